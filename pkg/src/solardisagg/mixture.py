"""Linear solar mixture: weight initialization, NNLS solve, prediction.

The target home's generation is approximated as ``s_hat = X @ w`` with
non-negative weights over K proxy series. Per-proxy initial weights
come from the closed-form scalar regression of the proxy's clear-sky
maximum-generation curve onto the target's, floored at a small positive
value; the iterative solver then refits the full weight vector by
non-negative least squares.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, Misaligned, ZeroProxy
from .timeseries import TimeSeries, Unit, require_aligned

#: Strict-positivity floor for initial weights.
EPS_WEIGHT = 1e-6

#: Dual-feasibility tolerance of the active-set solver.
NNLS_TOL = 1e-8

PROVENANCE = ("real", "synthetic")


@dataclass(frozen=True)
class ProxyMatrix:
    """K aligned proxy generation series with per-column provenance."""

    columns: tuple[TimeSeries, ...]
    provenance: tuple[str, ...]
    matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.columns:
            raise ValueError("proxy matrix needs at least one column")
        if len(self.provenance) != len(self.columns):
            raise ValueError("one provenance tag per column required")
        for tag in self.provenance:
            if tag not in PROVENANCE:
                raise ValueError(f"unknown provenance {tag!r}")
        require_aligned(*self.columns)
        mat = np.column_stack([c.values for c in self.columns])
        for k in range(mat.shape[1]):
            if not np.any(mat[:, k] > 0.0):
                raise ZeroProxy(f"proxy column {k} has no positive value")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def k(self) -> int:
        return len(self.columns)

    @property
    def t(self) -> int:
        return self.matrix.shape[0]

    def grid(self) -> TimeSeries:
        return self.columns[0]


@dataclass(frozen=True)
class WeightVector:
    """Non-negative mixture weights."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).copy()
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty vector")
        if np.any(w < 0.0):
            raise ValueError("weights must be non-negative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.weights.size


def init_weight(m_p: TimeSeries, m_c: TimeSeries) -> float:
    """Closed-form scalar weight fitting one proxy's maximum-generation
    curve to the target's, projected onto strict positivity."""
    require_aligned(m_p, m_c)
    denom = float(m_p.values @ m_p.values)
    if denom == 0.0:
        raise ZeroProxy("proxy maximum-generation curve is identically zero")
    return max(float(m_p.values @ m_c.values) / denom, EPS_WEIGHT)


def init_weights(max_gens: list[TimeSeries], m_c: TimeSeries) -> WeightVector:
    """Per-proxy scalar fits, each divided by the proxy count."""
    k = len(max_gens)
    if k < 1:
        raise ValueError("need at least one proxy")
    return WeightVector(
        np.array([init_weight(m_p, m_c) / k for m_p in max_gens])
    )


def nnls(a: np.ndarray, b: np.ndarray, tol: float = NNLS_TOL,
         max_iter: int | None = None) -> np.ndarray:
    """Non-negative least squares by the Lawson-Hanson active-set method.

    Solves ``min ||a @ x - b||_2`` subject to ``x >= 0``. Deterministic:
    the passive set grows by the most positive dual component, and the
    iteration count is capped at ``3 * n``.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m, n = a.shape
    if b.shape != (m,):
        raise DimensionMismatch(f"matrix {a.shape} vs vector {b.shape}")
    if max_iter is None:
        max_iter = 3 * n
    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    w = a.T @ b
    iters = 0
    while (not passive.all()) and np.any(w[~passive] > tol) and iters < max_iter:
        iters += 1
        free = np.flatnonzero(~passive)
        passive[free[np.argmax(w[free])]] = True
        while True:
            cols = np.flatnonzero(passive)
            z = np.zeros(n)
            z[cols] = np.linalg.lstsq(a[:, cols], b, rcond=None)[0]
            if np.all(z[cols] > 0.0):
                x = z
                break
            # step toward z until the first passive component hits zero
            neg = cols[z[cols] <= 0.0]
            gap = x[neg] - z[neg]
            alpha = np.min(np.where(gap > 0.0, x[neg] / np.where(gap > 0.0, gap, 1.0), 0.0))
            x = x + alpha * (z - x)
            drop = passive & (x <= tol)
            passive &= ~drop
            x[drop] = 0.0
            if not passive.any():
                break
        w = a.T @ (b - a @ x)
    return x


def solve_weights(x: ProxyMatrix, s: TimeSeries) -> WeightVector:
    """Fit non-negative mixture weights to a solar estimate."""
    require_aligned(x.grid(), s)
    if x.t < x.k:
        raise Misaligned(f"need T >= K, got T={x.t}, K={x.k}")
    return WeightVector(nnls(x.matrix, s.values))


def predict_solar(x: ProxyMatrix, w: WeightVector) -> TimeSeries:
    """Mixture prediction ``X @ w`` as a kW series."""
    if len(w) != x.k:
        raise DimensionMismatch(f"{x.k} proxies but {len(w)} weights")
    return x.grid().with_values(x.matrix @ w.weights, Unit.KW)
