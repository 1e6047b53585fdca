"""Alternating disaggregation loop for one customer.

Each iteration re-derives a load estimate from the current solar
estimate, refits the load model, recovers solar from the residual,
and refits the mixture weights; the loop stops when the max-abs weight
change falls to the tolerance or the iteration cap is hit. Post
processing clamps solar at zero, forces night intervals to zero, and
restores the net-load identity ``load = net + solar``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import loadmodel
from .errors import Misaligned, NonConvergence
from .loadmodel import LoadFeatures
from .mixture import ProxyMatrix, WeightVector
from .mixture import nnls
from .seeding import derive_seed
from .solargeo import night_mask_for
from .timeseries import SiteLocation, TimeSeries, Unit, require_aligned

#: Relative residual growth that aborts the loop as divergent.
DIVERGENCE_FACTOR = 10.0


@dataclass(frozen=True)
class DisaggConfig:
    max_iterations: int = 100
    epsilon: float = 1e-3
    master_seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class DisaggResult:
    solar: TimeSeries
    load: TimeSeries
    weights: WeightVector
    iterations: int
    weight_trajectory: tuple[np.ndarray, ...] = field(repr=False)
    converged: bool
    residuals: tuple[float, ...] = field(repr=False, default=())


def disaggregate(y: TimeSeries, x: ProxyMatrix, w0: WeightVector,
                 features: LoadFeatures, cfg: DisaggConfig,
                 loc: SiteLocation) -> DisaggResult:
    """Split net load into solar generation and home load.

    ``w0`` is used as given (any division by the proxy count happens at
    initialization). The location supplies the night mask applied to
    the final solar estimate.
    """
    require_aligned(y, x.grid())
    if len(features) != len(y) or features.start != y.start \
            or features.step_minutes != y.step_minutes:
        raise Misaligned("load features are not on the net-load grid")
    if len(w0) != x.k:
        raise Misaligned(f"{x.k} proxies but {len(w0)} initial weights")

    mat = x.matrix
    w = w0.weights
    s = mat @ w
    trajectory = [w.copy()]
    residuals: list[float] = []
    converged = False
    iterations = 0
    guard_floor = None

    for it in range(1, cfg.max_iterations + 1):
        iterations = it
        ell = s + y.values
        model = loadmodel.fit(
            features, y.with_values(ell, Unit.KW),
            seed=derive_seed(cfg.master_seed, it),
        )
        ell = loadmodel.predict(features, model).values
        s_target = ell - y.values
        w_new = nnls(mat, s_target)
        s = mat @ w_new
        resid = float(np.linalg.norm(s - s_target))
        residuals.append(resid)
        if guard_floor is None:
            guard_floor = max(resid, 1e-8 * (1.0 + float(np.linalg.norm(y.values))))
        elif resid > DIVERGENCE_FACTOR * guard_floor:
            raise NonConvergence(
                f"residual grew to {resid:.3g} (> {DIVERGENCE_FACTOR:g}x "
                f"initial {guard_floor:.3g}) at iteration {it}",
                trajectory=trajectory + [w_new.copy()],
            )
        delta = float(np.max(np.abs(w_new - w)))
        w = w_new
        trajectory.append(w.copy())
        if delta <= cfg.epsilon:
            converged = True
            break

    solar_vals = np.maximum(mat @ w, 0.0)
    solar_vals[night_mask_for(loc, y)] = 0.0
    solar = y.with_values(solar_vals, Unit.KW)
    load = y.with_values(y.values + solar_vals, Unit.KW)
    return DisaggResult(
        solar=solar,
        load=load,
        weights=WeightVector(w),
        iterations=iterations,
        weight_trajectory=tuple(trajectory),
        converged=converged,
        residuals=tuple(residuals),
    )
