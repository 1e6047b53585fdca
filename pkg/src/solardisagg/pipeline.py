"""Weight initialization pipeline for one target home.

Composes the three initialization steps: estimate PV deployment
parameters for the target (from net load via the base-load trick) and
for each real proxy (from its metered generation), derive clear-sky
maximum-generation curves for everyone, then fit one scalar weight per
proxy and divide by the proxy count.
"""
from __future__ import annotations

from dataclasses import dataclass

from .mixture import ProxyMatrix, WeightVector, init_weights
from .params import (
    BaseLoad,
    approx_target_solar,
    estimate_base_load,
    fit_pv_params,
    hemisphere_of,
)
from .pvmodel import PvParams, WeatherBundle, max_generation, synthesize_proxy
from .timeseries import SiteLocation, TimeSeries


@dataclass(frozen=True)
class WeightInit:
    """Initial mixture state: proxy matrix plus the scaled weight vector."""

    weights: WeightVector
    proxies: ProxyMatrix
    base_load: BaseLoad
    target_params: PvParams
    target_max_gen: TimeSeries
    proxy_params: tuple[PvParams, ...]
    proxy_max_gens: tuple[TimeSeries, ...]


def initialize_weights(
    net: TimeSeries,
    loc: SiteLocation,
    weather: WeatherBundle,
    real_proxies: list[TimeSeries],
    synthetic_params: list[PvParams],
    percentile: float | None = None,
    real_params: list[PvParams] | None = None,
    target_params: PvParams | None = None,
) -> WeightInit:
    """Build the proxy matrix and its initial weights for one home.

    Real proxy columns come first, synthetic columns after. Callers that
    estimate PV parameters repeatedly (the benchmark harness) can pass
    precomputed ``real_params`` / ``target_params`` to skip the grid
    searches; the result is identical.
    """
    if not real_proxies and not synthetic_params:
        raise ValueError("need at least one proxy")
    ambient = weather.require("temp")[0]
    hemisphere = hemisphere_of(loc)

    base = estimate_base_load(net, loc, percentile)
    if target_params is None:
        target_params = fit_pv_params(
            approx_target_solar(net, base), loc, ambient, hemisphere
        )
    target_max = max_generation(target_params, loc, ambient)

    if real_params is None:
        real_params = [
            fit_pv_params(proxy, loc, ambient, hemisphere)
            for proxy in real_proxies
        ]
    elif len(real_params) != len(real_proxies):
        raise ValueError("one PvParams per real proxy required")

    columns: list[TimeSeries] = list(real_proxies)
    provenance: list[str] = ["real"] * len(real_proxies)
    params_all: list[PvParams] = list(real_params)
    for sp in synthetic_params:
        columns.append(synthesize_proxy(sp, loc, weather))
        provenance.append("synthetic")
        params_all.append(sp)

    max_gens = [max_generation(p, loc, ambient) for p in params_all]
    weights = init_weights(max_gens, target_max)
    proxies = ProxyMatrix(columns=tuple(columns), provenance=tuple(provenance))
    return WeightInit(
        weights=weights,
        proxies=proxies,
        base_load=base,
        target_params=target_params,
        target_max_gen=target_max,
        proxy_params=tuple(params_all),
        proxy_max_gens=tuple(max_gens),
    )
