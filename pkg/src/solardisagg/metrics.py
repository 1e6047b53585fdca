"""Error metrics and the benchmark harness.

The harness mirrors the experimental procedures used to evaluate the
method: repeated trials with randomly drawn real proxies (excluding the
target), four proxy-setting variants, disaggregation-length sweeps and
weight-initialization comparisons, all reproducible from one seed.
"""
from __future__ import annotations

import statistics
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .disagg import DisaggConfig, disaggregate
from .errors import LengthTooLong, PoolTooSmall, ZeroMeanTruth
from .loadmodel import build_features
from .mixture import ProxyMatrix, WeightVector, init_weights
from .params import approx_target_solar, estimate_base_load, fit_pv_params, hemisphere_of
from .pvmodel import PvParams, max_generation, synthesize_proxy
from .scenario import ScenarioBundle
from .seeding import derive_seed
from .timeseries import SiteLocation, TimeSeries, require_aligned


def rmse(truth: TimeSeries, pred: TimeSeries) -> float:
    """Root mean squared difference over the aligned window."""
    require_aligned(truth, pred)
    diff = truth.values - pred.values
    return float(np.sqrt(diff @ diff / len(truth)))


def nrmse(truth: TimeSeries, pred: TimeSeries) -> float:
    """RMSE normalized by the mean of the true signal.

    The mean runs over every interval of the window, nights included.
    """
    mean_truth = float(truth.values.mean())
    if mean_truth <= 0.0:
        raise ZeroMeanTruth("nRMSE is undefined for a non-positive-mean truth")
    return rmse(truth, pred) / mean_truth


class ProxyVariant(str, Enum):
    THREE_PROXIES = "3proxies"
    ONE_P_ONE_SP = "1p+1sp"
    ONE_P_THREE_SP = "1p+3sp"
    THREE_SP = "3sp"


_N_REAL = {
    ProxyVariant.THREE_PROXIES: 3,
    ProxyVariant.ONE_P_ONE_SP: 1,
    ProxyVariant.ONE_P_THREE_SP: 1,
    ProxyVariant.THREE_SP: 0,
}
_N_SYNTH = {
    ProxyVariant.THREE_PROXIES: 0,
    ProxyVariant.ONE_P_ONE_SP: 1,
    ProxyVariant.ONE_P_THREE_SP: 3,
    ProxyVariant.THREE_SP: 3,
}


@dataclass(frozen=True)
class ProxySetting:
    """Proxy mix for one experiment variant.

    Synthetic proxies share one tilt (the absolute city latitude unless
    overridden) and one DC rating; in the three-synthetic variants their
    orientations are the hemisphere-ideal azimuth plus due east and due
    west, which shifts the proxy peaks across the day.
    """

    variant: ProxyVariant
    tilt_deg: float | None = None
    dc_rating_kw: float = 3.0
    orientations_deg: tuple[float, ...] | None = None

    @property
    def n_real(self) -> int:
        return _N_REAL[self.variant]

    @property
    def n_synthetic(self) -> int:
        return _N_SYNTH[self.variant]

    def synthetic_orientations(self, loc: SiteLocation) -> tuple[float, ...]:
        if self.orientations_deg is not None:
            if len(self.orientations_deg) != self.n_synthetic:
                raise ValueError(
                    f"{self.variant.value} needs {self.n_synthetic} orientations"
                )
            return self.orientations_deg
        ideal = 180.0 if loc.latitude >= 0.0 else 0.0
        if self.n_synthetic == 0:
            return ()
        if self.n_synthetic == 1:
            return (ideal,)
        return (ideal, 90.0, 270.0)

    def synthetic_params(self, loc: SiteLocation) -> list[PvParams]:
        tilt = abs(loc.latitude) if self.tilt_deg is None else self.tilt_deg
        tilt = min(tilt, 90.0)
        return [
            PvParams(tilt=tilt, orientation=o, dc_rating=self.dc_rating_kw)
            for o in self.synthetic_orientations(loc)
        ]


@dataclass(frozen=True)
class RunRecord:
    home: str
    trial: int
    seed: int
    solar_nrmse: float
    solar_rmse: float
    load_nrmse: float
    load_rmse: float
    iterations: int
    converged: bool


_METRICS = ("solar_nrmse", "solar_rmse", "load_nrmse", "load_rmse")


@dataclass(frozen=True)
class EvalReport:
    """Per-run records plus the aggregate views derived from them."""

    variant: str
    seed: int
    t_len: int
    trials: int
    records: tuple[RunRecord, ...]

    def per_home(self) -> dict[str, dict[str, float]]:
        """Mean of each metric across trials, per home."""
        homes: dict[str, list[RunRecord]] = {}
        for rec in self.records:
            homes.setdefault(rec.home, []).append(rec)
        return {
            name: {
                m: statistics.fmean(getattr(r, m) for r in recs)
                for m in _METRICS
            }
            for name, recs in sorted(homes.items())
        }

    def summary(self) -> dict[str, float]:
        """Mean across homes of the per-home means, plus spread stats."""
        per_home = self.per_home()
        out: dict[str, float] = {}
        for m in _METRICS:
            vals = [stats[m] for stats in per_home.values()]
            out[f"{m}_mean"] = statistics.fmean(vals)
            out[f"{m}_median"] = statistics.median(vals)
            q1, q3 = np.percentile(vals, [25.0, 75.0])
            out[f"{m}_iqr"] = float(q3 - q1)
        return out

    def iteration_stats(self) -> dict[str, float]:
        iters = [r.iterations for r in self.records]
        return {
            "runs": len(self.records),
            "mean": statistics.fmean(iters),
            "median": statistics.median(iters),
            "min": min(iters),
            "max": max(iters),
            "converged": sum(1 for r in self.records if r.converged),
            "capped": sum(1 for r in self.records if not r.converged),
        }

    def to_json_dict(self) -> dict:
        return {
            "variant": self.variant,
            "seed": self.seed,
            "t_len": self.t_len,
            "trials": self.trials,
            "summary": self.summary(),
            "iteration_stats": self.iteration_stats(),
            "per_home": self.per_home(),
            "records": [
                {
                    "home": r.home,
                    "trial": r.trial,
                    "seed": r.seed,
                    "solar_nrmse": r.solar_nrmse,
                    "solar_rmse": r.solar_rmse,
                    "load_nrmse": r.load_nrmse,
                    "load_rmse": r.load_rmse,
                    "iterations": r.iterations,
                    "converged": r.converged,
                }
                for r in self.records
            ],
        }


class _ParamCache:
    """Per-home parameter estimation shared across trials and variants."""

    def __init__(self, scenario: ScenarioBundle):
        self.scenario = scenario
        self.loc = scenario.location
        self.ambient = scenario.weather.temp
        self.hemisphere = hemisphere_of(self.loc)
        self._proxy: dict[int, tuple[PvParams, TimeSeries]] = {}
        self._target: dict[int, tuple[PvParams, TimeSeries]] = {}

    def proxy(self, idx: int) -> tuple[PvParams, TimeSeries]:
        if idx not in self._proxy:
            params = fit_pv_params(self.scenario.homes[idx].true_solar,
                                   self.loc, self.ambient, self.hemisphere)
            self._proxy[idx] = (params,
                                max_generation(params, self.loc, self.ambient))
        return self._proxy[idx]

    def target(self, idx: int) -> tuple[PvParams, TimeSeries]:
        if idx not in self._target:
            net = self.scenario.homes[idx].net
            base = estimate_base_load(net, self.loc)
            params = fit_pv_params(approx_target_solar(net, base),
                                   self.loc, self.ambient, self.hemisphere)
            self._target[idx] = (params,
                                 max_generation(params, self.loc, self.ambient))
        return self._target[idx]


def _check_pool(scenario: ScenarioBundle, setting: ProxySetting) -> None:
    needed = setting.n_real + 1
    if scenario.n_homes < max(needed, 2):
        raise PoolTooSmall(
            f"{setting.variant.value} needs >= {max(needed, 2)} homes, "
            f"scenario has {scenario.n_homes}"
        )


def _benchmark(scenario: ScenarioBundle, setting: ProxySetting, trials: int,
               seed: int, config: DisaggConfig, init_mode: str) -> EvalReport:
    _check_pool(scenario, setting)
    loc = scenario.location
    weather = scenario.weather
    features = build_features(weather.temp, loc)
    cache = _ParamCache(scenario)
    sp_params = setting.synthetic_params(loc)
    sp_columns = [synthesize_proxy(p, loc, weather) for p in sp_params]
    sp_max = [max_generation(p, loc, weather.temp) for p in sp_params]
    k = setting.n_real + setting.n_synthetic

    records: list[RunRecord] = []
    for hi, home in enumerate(scenario.homes):
        for trial in range(trials):
            run_seed = derive_seed(seed, hi, trial)
            rng = np.random.default_rng(run_seed)
            pool = [j for j in range(scenario.n_homes) if j != hi]
            chosen = [int(j) for j in
                      rng.choice(pool, size=setting.n_real, replace=False)]
            real_cols = [scenario.homes[j].true_solar for j in chosen]
            columns = tuple(real_cols + sp_columns)
            provenance = tuple(["real"] * len(real_cols)
                               + ["synthetic"] * len(sp_columns))
            proxies = ProxyMatrix(columns=columns, provenance=provenance)

            if init_mode == "ours":
                _, target_max = cache.target(hi)
                max_gens = [cache.proxy(j)[1] for j in chosen] + sp_max
                w0 = init_weights(max_gens, target_max)
            elif init_mode == "constant_one":
                w0 = WeightVector(np.ones(k))
            elif init_mode == "uniform_random":
                w0 = WeightVector(
                    np.random.default_rng(derive_seed(seed, hi, trial, 11))
                    .uniform(0.0, 1.0, k)
                )
            else:
                raise ValueError(f"unknown init mode {init_mode!r}")

            result = disaggregate(
                home.net, proxies, w0, features,
                replace(config, master_seed=derive_seed(seed, hi, trial, 7)),
                loc,
            )
            records.append(RunRecord(
                home=home.name,
                trial=trial,
                seed=run_seed,
                solar_nrmse=nrmse(home.true_solar, result.solar),
                solar_rmse=rmse(home.true_solar, result.solar),
                load_nrmse=nrmse(home.true_load, result.load),
                load_rmse=rmse(home.true_load, result.load),
                iterations=result.iterations,
                converged=result.converged,
            ))
    return EvalReport(
        variant=setting.variant.value,
        seed=seed,
        t_len=len(scenario.grid()),
        trials=trials,
        records=tuple(records),
    )


def run_benchmark(scenario: ScenarioBundle, setting: ProxySetting,
                  trials: int, seed: int,
                  config: DisaggConfig | None = None) -> EvalReport:
    """Repeated-trial evaluation with randomly drawn real proxies.

    Each (home, trial) draws real proxies uniformly without replacement
    from the other homes, initializes weights, disaggregates and scores
    against the scenario truth. Aggregation is mean-per-home first,
    then mean across homes.
    """
    return _benchmark(scenario, setting, trials, seed,
                      config or DisaggConfig(), init_mode="ours")


def compare_initializations(scenario: ScenarioBundle, setting: ProxySetting,
                            seed: int, trials: int = 10,
                            config: DisaggConfig | None = None
                            ) -> dict[str, EvalReport]:
    """Same benchmark under three weight initializations.

    ``ours`` is the maximum-generation fit, ``constant_one`` starts at
    all-ones, ``uniform_random`` draws each weight from U[0, 1]; proxy
    selection is identical across the three, so only w0 differs.
    """
    config = config or DisaggConfig()
    return {
        mode: _benchmark(scenario, setting, trials, seed, config, mode)
        for mode in ("ours", "constant_one", "uniform_random")
    }


def sweep_length(scenario: ScenarioBundle, lengths: list[int],
                 setting: ProxySetting, seed: int,
                 config: DisaggConfig | None = None) -> dict[int, EvalReport]:
    """Disaggregate the window in independent consecutive blocks.

    Weight initialization runs once per home on the full window (the
    parameter estimator needs multiple days); each block is then
    disaggregated independently with the shared initial weights. Blocks
    appear as the ``trial`` dimension of each report.
    """
    config = config or DisaggConfig()
    _check_pool(scenario, setting)
    t_total = len(scenario.grid())
    for length in lengths:
        if length > t_total:
            raise LengthTooLong(f"length {length} exceeds window {t_total}")
        if length < 2:
            raise ValueError("block length must be >= 2")
    loc = scenario.location
    weather = scenario.weather
    features = build_features(weather.temp, loc)
    cache = _ParamCache(scenario)
    sp_params = setting.synthetic_params(loc)
    sp_columns = [synthesize_proxy(p, loc, weather) for p in sp_params]
    sp_max = [max_generation(p, loc, weather.temp) for p in sp_params]

    # proxy draw fixed per home (trial 0) so lengths differ only in blocking
    out: dict[int, EvalReport] = {}
    per_home_setup = []
    for hi, home in enumerate(scenario.homes):
        rng = np.random.default_rng(derive_seed(seed, hi, 0))
        pool = [j for j in range(scenario.n_homes) if j != hi]
        chosen = [int(j) for j in
                  rng.choice(pool, size=setting.n_real, replace=False)]
        real_cols = [scenario.homes[j].true_solar for j in chosen]
        columns = tuple(real_cols + sp_columns)
        provenance = tuple(["real"] * len(real_cols)
                           + ["synthetic"] * len(sp_columns))
        _, target_max = cache.target(hi)
        max_gens = [cache.proxy(j)[1] for j in chosen] + sp_max
        w0 = init_weights(max_gens, target_max)
        per_home_setup.append((home, ProxyMatrix(columns, provenance), w0))

    for length in lengths:
        records: list[RunRecord] = []
        n_blocks = t_total // length
        for hi, (home, proxies, w0) in enumerate(per_home_setup):
            for b in range(n_blocks):
                first = b * length
                y_blk = home.net.slice(first, length)
                cols_blk = tuple(c.slice(first, length) for c in proxies.columns)
                proxies_blk = ProxyMatrix(cols_blk, proxies.provenance)
                feats_blk = features.slice(first, length)
                result = disaggregate(
                    y_blk, proxies_blk, w0, feats_blk,
                    replace(config,
                            master_seed=derive_seed(seed, hi, length, b)),
                    loc,
                )
                truth_solar = home.true_solar.slice(first, length)
                truth_load = home.true_load.slice(first, length)
                records.append(RunRecord(
                    home=home.name,
                    trial=b,
                    seed=derive_seed(seed, hi, length, b),
                    solar_nrmse=nrmse(truth_solar, result.solar),
                    solar_rmse=rmse(truth_solar, result.solar),
                    load_nrmse=nrmse(truth_load, result.load),
                    load_rmse=rmse(truth_load, result.load),
                    iterations=result.iterations,
                    converged=result.converged,
                ))
        out[length] = EvalReport(
            variant=setting.variant.value,
            seed=seed,
            t_len=length,
            trials=n_blocks,
            records=tuple(records),
        )
    return out
