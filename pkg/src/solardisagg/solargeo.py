"""Solar position, air mass and clear-sky irradiance.

Position uses the closed-form astronomical approximations (Cooper
declination, Spencer equation of time, hour angle from local solar
time), which track high-accuracy calculators to within about a degree;
that is ample for proxy synthesis. The clear-sky model is Meinel's
air-mass attenuation with a fixed solar constant and a 10% diffuse
fraction, chosen so every run reproduces bit-comparable curves.

All functions accept scalars or numpy arrays and are pure.
"""
from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .timeseries import SiteLocation, TimeSeries, _as_utc

D2R = np.pi / 180.0

#: Extraterrestrial normal irradiance used by the clear-sky model [W/m2].
SOLAR_CONSTANT = 1353.0

#: Diffuse fraction of clear-sky DNI.
DIFFUSE_FRACTION = 0.10

#: Zenith angle at and beyond which an interval counts as night.
NIGHT_ZENITH_DEG = 100.0


@dataclass(frozen=True)
class SolarAngles:
    """Sun geometry at one instant; azimuth is clockwise from north."""

    zenith: float
    azimuth: float
    declination: float
    hour_angle: float


@dataclass(frozen=True)
class ClearSkyIrradiance:
    dni: float
    dhi: float
    ghi: float


def _day_of_year(index64: np.ndarray) -> np.ndarray:
    years = index64.astype("datetime64[Y]")
    return (index64.astype("datetime64[D]") - years).astype(np.int64) + 1


def _minutes_of_day(index64: np.ndarray) -> np.ndarray:
    days = index64.astype("datetime64[D]")
    return (index64 - days).astype("timedelta64[s]").astype(np.float64) / 60.0


def declination_deg(day_of_year) -> np.ndarray:
    """Cooper's declination approximation [degrees]."""
    n = np.asarray(day_of_year, dtype=np.float64)
    return 23.45 * np.sin(2.0 * np.pi * (284.0 + n) / 365.0)


def equation_of_time_min(day_of_year) -> np.ndarray:
    """Spencer's equation of time [minutes]."""
    b = 2.0 * np.pi * (np.asarray(day_of_year, dtype=np.float64) - 1.0) / 365.0
    return 229.18 * (
        0.000075
        + 0.001868 * np.cos(b)
        - 0.032077 * np.sin(b)
        - 0.014615 * np.cos(2.0 * b)
        - 0.040890 * np.sin(2.0 * b)
    )


def _position_arrays(loc: SiteLocation, index64: np.ndarray):
    doy = _day_of_year(index64)
    dec = declination_deg(doy)
    eot = equation_of_time_min(doy)
    solar_min = (_minutes_of_day(index64) + eot + 4.0 * loc.longitude) % 1440.0
    ha = solar_min / 4.0 - 180.0
    ha = np.where(ha < -180.0, ha + 360.0, ha)
    lat = loc.latitude * D2R
    dec_r = dec * D2R
    ha_r = ha * D2R
    cos_z = np.sin(lat) * np.sin(dec_r) + np.cos(lat) * np.cos(dec_r) * np.cos(ha_r)
    zenith = np.arccos(np.clip(cos_z, -1.0, 1.0)) / D2R
    az = np.arctan2(
        np.sin(ha_r),
        np.cos(ha_r) * np.sin(lat) - np.tan(dec_r) * np.cos(lat),
    ) / D2R + 180.0
    azimuth = np.mod(az, 360.0)
    return zenith, azimuth, dec, ha


def solar_position(loc: SiteLocation, t: datetime) -> SolarAngles:
    """Sun angles for one UTC timestamp."""
    t64 = np.datetime64(_as_utc(t).replace(tzinfo=None), "s")
    z, a, d, h = _position_arrays(loc, np.asarray([t64]))
    return SolarAngles(float(z[0]), float(a[0]), float(d[0]), float(h[0]))


def zenith_azimuth_series(loc: SiteLocation, index64: np.ndarray):
    """Vectorized (zenith, azimuth) in degrees over a datetime64 index."""
    z, a, _, _ = _position_arrays(loc, index64)
    return z, a


def air_mass(zenith) -> np.ndarray:
    """Kasten-Young relative air mass; +inf at and below the horizon."""
    z = np.asarray(zenith, dtype=np.float64)
    below = z >= 90.0
    zc = np.where(below, 0.0, z)
    am = 1.0 / (np.cos(zc * D2R) + 0.50572 * (96.07995 - zc) ** -1.6364)
    return np.where(below, np.inf, am)[()]


def clear_sky_arrays(zenith):
    """Clear-sky (dni, dhi, ghi) arrays for zenith angles in degrees."""
    z = np.asarray(zenith, dtype=np.float64)
    am = air_mass(z)
    dni = np.where(
        np.isfinite(am),
        SOLAR_CONSTANT * 0.7 ** np.where(np.isfinite(am), am, 1.0) ** 0.678,
        0.0,
    )
    cos_z = np.maximum(np.cos(z * D2R), 0.0)
    dhi = DIFFUSE_FRACTION * dni * cos_z
    ghi = dni * cos_z + dhi
    return dni, dhi, ghi


def clear_sky(loc: SiteLocation, t: datetime) -> ClearSkyIrradiance:
    """Clear-sky irradiance triple at one instant; all zero at night."""
    angles = solar_position(loc, t)
    dni, dhi, ghi = clear_sky_arrays(angles.zenith)
    return ClearSkyIrradiance(float(dni), float(dhi), float(ghi))


def night_mask(loc: SiteLocation, index64: np.ndarray,
               threshold_deg: float = NIGHT_ZENITH_DEG) -> np.ndarray:
    """Boolean mask of intervals counted as night (civil-dark margin)."""
    zenith, _ = zenith_azimuth_series(loc, index64)
    return zenith >= threshold_deg


def night_mask_for(loc: SiteLocation, series: TimeSeries) -> np.ndarray:
    return night_mask(loc, series.index64())
