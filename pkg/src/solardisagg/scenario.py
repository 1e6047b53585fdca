"""Ground-truth scenario generator.

Builds synthetic neighborhoods with known PV parameters, weather,
loads, and net loads so every pipeline stage can be scored against an
exact truth without licensed meter datasets. A shared smoothed
lognormal cloud field reproduces the city-wide correlation between PV
systems; the weather bundle the disaggregation engine sees carries a
deliberately smoothed copy of that field (coarse, city-scale data),
while each home's true generation responds to the sharp field plus a
small private jitter.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .loadmodel import LoadFeatures, build_features
from .mixture import ProxyMatrix, WeightVector
from .pvmodel import PvParams, WeatherBundle, max_generation, synthesize_proxy
from .solargeo import clear_sky_arrays, zenith_azimuth_series
from .timeseries import SiteLocation, TimeSeries, Unit

DEFAULT_START = datetime(2018, 6, 1, tzinfo=timezone.utc)
DEFAULT_LOCATION = SiteLocation(30.292432, -97.699662, utc_offset=-6.0)

#: Floor of the multiplicative cloud attenuation field.
CLOUD_FLOOR = 0.15


@dataclass(frozen=True)
class NoiseConfig:
    """Stochastic knobs of the generator; zeroed() gives the noiseless
    clear-sky degenerate case."""

    cloud_strength: float = 0.55
    cloud_fast_weight: float = 0.35
    city_smoothing_hours: float = 6.0
    city_error: float = 0.18
    home_jitter: float = 0.04
    load_noise_kw: float = 0.15
    temp_noise_c: float = 2.0
    #: daytime cooling per unit cloud attenuation deficit [degC]; couples
    #: temperature to cloud cover, which is what makes the load/solar
    #: split genuinely ambiguous for a temperature-driven load model
    temp_cloud_coupling_c: float = 6.0
    wind_noise_ms: float = 0.6

    @classmethod
    def zeroed(cls) -> "NoiseConfig":
        return cls(cloud_strength=0.0, cloud_fast_weight=0.0,
                   city_error=0.0, home_jitter=0.0, load_noise_kw=0.0,
                   temp_noise_c=0.0, temp_cloud_coupling_c=0.0,
                   wind_noise_ms=0.0)


@dataclass(frozen=True)
class HomeTruth:
    name: str
    params: PvParams
    true_load: TimeSeries
    true_solar: TimeSeries
    net: TimeSeries


@dataclass(frozen=True)
class ScenarioBundle:
    location: SiteLocation
    weather: WeatherBundle
    homes: tuple[HomeTruth, ...]
    seed: int
    noise: NoiseConfig = field(default_factory=NoiseConfig)

    @property
    def n_homes(self) -> int:
        return len(self.homes)

    @property
    def step_minutes(self) -> int:
        return self.weather.temp.step_minutes

    def grid(self) -> TimeSeries:
        return self.weather.temp


def _smooth_raw(values: np.ndarray, width_samples: float) -> np.ndarray:
    """Gaussian smoothing with reflect padding."""
    if width_samples <= 0:
        return values
    half = max(int(3 * width_samples), 1)
    kernel = np.exp(-0.5 * (np.arange(-half, half + 1) / width_samples) ** 2)
    kernel /= kernel.sum()
    padded = np.pad(values, half, mode="reflect")
    return np.convolve(padded, kernel, mode="valid")


def _smooth(values: np.ndarray, width_samples: float) -> np.ndarray:
    """Smooth white noise and restandardize to zero mean, unit variance."""
    out = _smooth_raw(values, width_samples)
    std = out.std()
    if std > 1e-12:
        return (out - out.mean()) / std
    return out - out.mean()


def _local_hour(index64: np.ndarray, loc: SiteLocation) -> np.ndarray:
    local = index64 + np.timedelta64(int(round(loc.utc_offset * 3600)), "s")
    days = local.astype("datetime64[D]")
    return (local - days).astype("timedelta64[s]").astype(np.float64) / 3600.0


def _weekday(index64: np.ndarray, loc: SiteLocation) -> np.ndarray:
    local = index64 + np.timedelta64(int(round(loc.utc_offset * 3600)), "s")
    dow = (local.astype("datetime64[D]").astype(np.int64) + 3) % 7
    return (dow < 5).astype(np.float64)


# Relative diurnal consumption shape per local hour (0..23).
_LOAD_TEMPLATE = np.array([
    0.10, 0.08, 0.07, 0.07, 0.08, 0.15, 0.35, 0.55, 0.45, 0.30, 0.25, 0.25,
    0.28, 0.25, 0.25, 0.30, 0.45, 0.70, 0.90, 0.95, 0.80, 0.55, 0.30, 0.15,
])


def _cloud_fields(rng: np.random.Generator, t_len: int, per_day: int,
                  noise: NoiseConfig):
    """(sharp neighborhood field, smoothed city field) in [floor, 1]."""
    if noise.cloud_strength == 0.0:
        ones = np.ones(t_len)
        return ones, ones.copy()
    slow = _smooth(rng.standard_normal(t_len), per_day / 2.5)
    fast = _smooth(rng.standard_normal(t_len), per_day / 24.0)
    city_noise = _smooth(rng.standard_normal(t_len), per_day / 8.0)
    z = noise.cloud_strength * (
        (1.0 - noise.cloud_fast_weight) * slow + noise.cloud_fast_weight * fast
    ) - 0.25
    sharp = np.clip(np.exp(z), CLOUD_FLOOR, 1.0)
    # the engine's weather feed is coarse: heavily smoothed and carrying
    # its own measurement error, like gridded satellite irradiance
    width = noise.city_smoothing_hours * per_day / 24.0
    z_city = _smooth_raw(z, width) + noise.city_error * city_noise
    city = np.clip(np.exp(z_city), CLOUD_FLOOR, 1.0)
    return sharp, city


def _cloudy_irradiance(cs_dni, cs_dhi, cos_z, attenuation):
    """Apply a cloud attenuation field to clear-sky components."""
    dni = cs_dni * attenuation ** 2
    dhi = cs_dhi * attenuation + 0.25 * cs_dni * cos_z * attenuation * (1.0 - attenuation)
    ghi = dni * cos_z + dhi
    return dni, dhi, ghi


def generate_scenario(seed: int, n_homes: int, days: int, step_minutes: int,
                      loc: SiteLocation = DEFAULT_LOCATION,
                      noise: NoiseConfig | None = None,
                      start: datetime = DEFAULT_START) -> ScenarioBundle:
    """Deterministically synthesize a neighborhood of PV homes."""
    if n_homes < 2:
        raise ValueError("need at least two homes")
    if days < 1:
        raise ValueError("need at least one day")
    noise = NoiseConfig() if noise is None else noise
    per_day = 24 * 60 // step_minutes
    t_len = days * per_day
    grid = TimeSeries(start, step_minutes, np.zeros(t_len), Unit.DIMENSIONLESS)
    index64 = grid.index64()
    zenith, azimuth = zenith_azimuth_series(loc, index64)
    cos_z = np.maximum(np.cos(np.deg2rad(zenith)), 0.0)
    cs_dni, cs_dhi, _ = clear_sky_arrays(zenith)
    hour_f = _local_hour(index64, loc)
    weekday = _weekday(index64, loc)

    rng_weather = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    sharp, city = _cloud_fields(rng_weather, t_len, per_day, noise)

    sun_up = cos_z / max(float(cos_z.max()), 1e-9)
    temp_vals = (
        20.0
        + 8.0 * np.sin(2.0 * np.pi * (hour_f - 9.0) / 24.0)
        - noise.temp_cloud_coupling_c * (1.0 - sharp) * sun_up
        + noise.temp_noise_c * _smooth(rng_weather.standard_normal(t_len),
                                       per_day / 12.0)
    )
    wind_vals = np.maximum(
        1.0 + noise.wind_noise_ms * _smooth(rng_weather.standard_normal(t_len),
                                            per_day / 12.0),
        0.0,
    )
    city_dni, city_dhi, city_ghi = _cloudy_irradiance(cs_dni, cs_dhi, cos_z, city)
    weather = WeatherBundle(
        temp=grid.with_values(temp_vals, Unit.DEG_C),
        wind=grid.with_values(wind_vals, Unit.M_PER_S),
        dni=grid.with_values(city_dni, Unit.W_PER_M2),
        dhi=grid.with_values(city_dhi, Unit.W_PER_M2),
        ghi=grid.with_values(city_ghi, Unit.W_PER_M2),
    )

    ideal = 180.0 if loc.latitude >= 0.0 else 0.0
    hour_idx = hour_f.astype(np.int64)
    homes = []
    for i in range(n_homes):
        rng = np.random.default_rng(np.random.SeedSequence([seed, 2, i]))
        tilt = rng.uniform(10.0, 45.0)
        orientation = (ideal + rng.uniform(-60.0, 60.0)) % 360.0
        rating = rng.uniform(2.0, 8.0)
        params = PvParams(tilt=tilt, orientation=orientation, dc_rating=rating)

        jitter = noise.home_jitter * _smooth(rng.standard_normal(t_len),
                                             per_day / 24.0)
        local_field = np.clip(sharp * np.exp(jitter), CLOUD_FLOOR, 1.0) \
            if noise.cloud_strength > 0.0 or noise.home_jitter > 0.0 else sharp
        dni_i, dhi_i, ghi_i = _cloudy_irradiance(cs_dni, cs_dhi, cos_z, local_field)
        local_weather = WeatherBundle(
            temp=weather.temp, wind=weather.wind,
            dni=grid.with_values(dni_i, Unit.W_PER_M2),
            dhi=grid.with_values(dhi_i, Unit.W_PER_M2),
            ghi=grid.with_values(ghi_i, Unit.W_PER_M2),
        )
        solar = synthesize_proxy(params, loc, local_weather)

        base = rng.uniform(0.25, 0.55)
        profile = np.maximum(
            _LOAD_TEMPLATE * rng.uniform(0.7, 1.4)
            + rng.normal(0.0, 0.04, 24),
            0.0,
        )
        theta_temp = rng.uniform(0.02, 0.08)
        theta_week = rng.uniform(0.05, 0.25)
        load_noise = noise.load_noise_kw * _smooth(rng.standard_normal(t_len),
                                                   per_day / 24.0)
        load_vals = np.maximum(
            base
            + profile[hour_idx]
            + theta_temp * np.maximum(temp_vals - 22.0, 0.0)
            + theta_week * weekday
            + load_noise,
            0.0,
        )
        true_load = grid.with_values(load_vals, Unit.KW)
        net = grid.with_values(load_vals - solar.values, Unit.KW)
        homes.append(HomeTruth(
            name=f"home_{i:02d}", params=params,
            true_load=true_load, true_solar=solar, net=net,
        ))

    return ScenarioBundle(location=loc, weather=weather, homes=tuple(homes),
                          seed=int(seed), noise=noise)


@dataclass(frozen=True)
class RealizableCase:
    """Noiseless construction where the loop's fixed point is the truth:
    load depends only on the four features and solar is an exact
    non-negative mixture of the provided proxies."""

    net: TimeSeries
    proxies: ProxyMatrix
    true_weights: WeightVector
    true_solar: TimeSeries
    true_load: TimeSeries
    features: LoadFeatures
    location: SiteLocation
    max_gens: tuple[TimeSeries, ...]
    target_max_gen: TimeSeries


def make_realizable_case(seed: int, days: int = 15, step_minutes: int = 30,
                         loc: SiteLocation = DEFAULT_LOCATION,
                         k_proxies: int = 3,
                         start: datetime = DEFAULT_START) -> RealizableCase:
    """Build a feature-realizable, exactly mixable test case.

    A shared cloud field drives all proxies (and hence the target's
    exact mixture), giving solar day-to-day variation that the strictly
    daily-periodic features cannot express; that makes the load/solar
    split identifiable. Load itself is piecewise-constant in the four
    features, so the forest can represent it exactly.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 3]))
    per_day = 24 * 60 // step_minutes
    t_len = days * per_day
    grid = TimeSeries(start, step_minutes, np.zeros(t_len), Unit.DIMENSIONLESS)
    index64 = grid.index64()
    hour_f = _local_hour(index64, loc)
    weekday = _weekday(index64, loc)
    zenith, _ = zenith_azimuth_series(loc, index64)
    cos_z = np.maximum(np.cos(np.deg2rad(zenith)), 0.0)
    cs_dni, cs_dhi, _ = clear_sky_arrays(zenith)

    cloud, _ = _cloud_fields(rng, t_len, per_day,
                             NoiseConfig(cloud_strength=0.5))
    temp_vals = 20.0 + 8.0 * np.sin(2.0 * np.pi * (hour_f - 9.0) / 24.0)
    wind_vals = np.ones(t_len)
    dni, dhi, ghi = _cloudy_irradiance(cs_dni, cs_dhi, cos_z, cloud)
    weather = WeatherBundle(
        temp=grid.with_values(temp_vals, Unit.DEG_C),
        wind=grid.with_values(wind_vals, Unit.M_PER_S),
        dni=grid.with_values(dni, Unit.W_PER_M2),
        dhi=grid.with_values(dhi, Unit.W_PER_M2),
        ghi=grid.with_values(ghi, Unit.W_PER_M2),
    )

    ideal = 180.0 if loc.latitude >= 0.0 else 0.0
    # well-separated orientations keep the proxy columns far from collinear
    offsets = np.linspace(-60.0, 60.0, k_proxies) if k_proxies > 1 else [0.0]
    columns = []
    max_gens = []
    for k in range(k_proxies):
        params = PvParams(
            tilt=float(rng.uniform(15.0, 40.0)),
            orientation=(ideal + offsets[k] + float(rng.uniform(-12.0, 12.0)))
            % 360.0,
            dc_rating=float(rng.uniform(2.0, 6.0)),
        )
        columns.append(synthesize_proxy(params, loc, weather))
        max_gens.append(max_generation(params, loc, weather.temp))
    proxies = ProxyMatrix(columns=tuple(columns),
                          provenance=("real",) * k_proxies)
    w_true = rng.uniform(0.3, 1.2, k_proxies)
    s_true = proxies.matrix @ w_true

    target_params = PvParams(
        tilt=float(rng.uniform(15.0, 40.0)),
        orientation=(ideal + float(rng.uniform(-50.0, 50.0))) % 360.0,
        dc_rating=float(rng.uniform(2.0, 6.0)),
    )
    target_max_gen = max_generation(target_params, loc, weather.temp)

    # load is piecewise-constant in the features so trees can represent
    # it exactly: hour profile, weekday shift, and a binned temperature term
    profile = np.maximum(_LOAD_TEMPLATE * float(rng.uniform(0.8, 1.3)), 0.0)
    theta_week = float(rng.uniform(0.05, 0.25))
    temp_bins = np.floor(np.maximum(temp_vals - 22.0, 0.0))
    load_vals = 0.4 + profile[hour_f.astype(np.int64)] \
        + theta_week * weekday + 0.05 * temp_bins
    true_load = grid.with_values(load_vals, Unit.KW)
    true_solar = grid.with_values(s_true, Unit.KW)
    net = grid.with_values(load_vals - s_true, Unit.KW)
    features = build_features(weather.temp, loc)
    return RealizableCase(
        net=net, proxies=proxies, true_weights=WeightVector(w_true),
        true_solar=true_solar, true_load=true_load, features=features,
        location=loc, max_gens=tuple(max_gens), target_max_gen=target_max_gen,
    )
