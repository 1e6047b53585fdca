"""Behind-the-meter solar disaggregation.

Separates a customer's net-load series into home load and PV
generation using a non-negative mixture of real and synthetic solar
proxies, a regression-forest load model, and an alternating estimation
loop, plus the physical PV simulator, scenario generator and
benchmark harness needed to exercise the pipeline end to end.
"""
from .disagg import DisaggConfig, DisaggResult, disaggregate
from .loadmodel import LoadFeatures, LoadModelParams, build_features
from .metrics import (
    EvalReport,
    ProxySetting,
    ProxyVariant,
    compare_initializations,
    nrmse,
    rmse,
    run_benchmark,
    sweep_length,
)
from .mixture import (
    ProxyMatrix,
    WeightVector,
    init_weight,
    init_weights,
    predict_solar,
    solve_weights,
)
from .params import (
    BaseLoad,
    approx_target_solar,
    estimate_base_load,
    fit_pv_params,
    hemisphere_of,
)
from .pipeline import WeightInit, initialize_weights
from .pvmodel import (
    PvParams,
    WeatherBundle,
    WeatherRecord,
    cell_temperature,
    max_generation,
    poa_irradiance,
    pv_power,
    synthesize_proxy,
)
from .scenario import (
    NoiseConfig,
    RealizableCase,
    ScenarioBundle,
    generate_scenario,
    make_realizable_case,
)
from .solargeo import (
    ClearSkyIrradiance,
    SolarAngles,
    air_mass,
    clear_sky,
    night_mask,
    solar_position,
)
from .timeseries import (
    SiteLocation,
    TimeSeries,
    Unit,
    align,
    truncate_nonneg,
    upsample_linear,
)

__version__ = "0.1.0"

__all__ = [
    "BaseLoad",
    "ClearSkyIrradiance",
    "DisaggConfig",
    "DisaggResult",
    "EvalReport",
    "LoadFeatures",
    "LoadModelParams",
    "NoiseConfig",
    "ProxyMatrix",
    "ProxySetting",
    "ProxyVariant",
    "PvParams",
    "RealizableCase",
    "ScenarioBundle",
    "SiteLocation",
    "SolarAngles",
    "TimeSeries",
    "Unit",
    "WeatherBundle",
    "WeatherRecord",
    "WeightInit",
    "WeightVector",
    "air_mass",
    "align",
    "approx_target_solar",
    "build_features",
    "cell_temperature",
    "clear_sky",
    "compare_initializations",
    "disaggregate",
    "estimate_base_load",
    "fit_pv_params",
    "generate_scenario",
    "hemisphere_of",
    "init_weight",
    "init_weights",
    "initialize_weights",
    "make_realizable_case",
    "max_generation",
    "night_mask",
    "nrmse",
    "poa_irradiance",
    "predict_solar",
    "pv_power",
    "rmse",
    "run_benchmark",
    "solar_position",
    "solve_weights",
    "sweep_length",
    "synthesize_proxy",
    "truncate_nonneg",
    "upsample_linear",
]
