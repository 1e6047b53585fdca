"""Physical PV performance model.

DC power follows the standard rating/temperature form
``P = (I_tr / E_ref) * P_dc0 * (1 + gamma * (T_cell - T_ref))`` with
plane-of-array irradiance from an isotropic-sky transposition and cell
temperature from the Sandia open-rack module-temperature model. The
same per-interval pipeline produces synthetic proxy series (measured
weather) and maximum-generation curves (clear-sky weather, nominal
wind).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MissingChannel
from .solargeo import clear_sky_arrays, zenith_azimuth_series
from .timeseries import SiteLocation, TimeSeries, Unit, require_aligned

D2R = np.pi / 180.0

#: Ground reflectance used by the transposition model.
ALBEDO_DEFAULT = 0.2

# Sandia open-rack glass/polymer coefficients.
SANDIA_A = -3.56
SANDIA_B = -0.075
SANDIA_DELTA_T = 3.0

#: Wind speed assumed when computing maximum (clear-sky) generation [m/s].
MAX_GEN_WIND_MS = 1.0


@dataclass(frozen=True)
class PvParams:
    """Deployment characteristics and technical constants of one PV system.

    ``orientation`` is the surface azimuth in degrees clockwise from
    north (0=N, 90=E, 180=S, 270=W); ``dc_rating`` is the nameplate DC
    power in kW at reference irradiance/temperature.
    """

    tilt: float
    orientation: float
    dc_rating: float
    gamma: float = -0.0047
    e_ref: float = 1000.0
    t_ref: float = 25.0

    def __post_init__(self):
        if not 0.0 <= self.tilt <= 90.0:
            raise ValueError(f"tilt {self.tilt} outside [0, 90]")
        if not 0.0 <= self.orientation < 360.0:
            raise ValueError(f"orientation {self.orientation} outside [0, 360)")
        if self.dc_rating <= 0.0:
            raise ValueError("dc_rating must be positive")
        if self.e_ref <= 0.0:
            raise ValueError("e_ref must be positive")


@dataclass(frozen=True)
class WeatherRecord:
    """One interval of weather; irradiances must be non-negative."""

    ambient_temp: float
    wind_speed: float
    dni: float
    dhi: float
    ghi: float

    def __post_init__(self):
        if min(self.dni, self.dhi, self.ghi) < 0.0:
            raise ValueError("irradiance components must be >= 0")
        if self.wind_speed < 0.0:
            raise ValueError("wind speed must be >= 0")


@dataclass(frozen=True)
class WeatherBundle:
    """Aligned weather channels; any channel may be absent (None)."""

    temp: TimeSeries | None = None
    wind: TimeSeries | None = None
    dni: TimeSeries | None = None
    dhi: TimeSeries | None = None
    ghi: TimeSeries | None = None

    CHANNELS = ("temp", "wind", "dni", "dhi", "ghi")

    def __post_init__(self):
        present = [s for s in self.present().values()]
        if present:
            require_aligned(*present)

    def present(self) -> dict[str, TimeSeries]:
        return {
            name: getattr(self, name)
            for name in self.CHANNELS
            if getattr(self, name) is not None
        }

    def require(self, *names: str) -> list[TimeSeries]:
        out = []
        for name in names:
            series = getattr(self, name)
            if series is None:
                raise MissingChannel(f"weather bundle is missing channel '{name}'")
            out.append(series)
        return out

    def reference(self) -> TimeSeries:
        present = self.present()
        if not present:
            raise MissingChannel("weather bundle has no channels")
        return next(iter(present.values()))


def poa_transposition(dni, dhi, ghi, zenith_deg, azimuth_deg,
                      tilt_deg, orientation_deg, albedo):
    """Isotropic-sky plane-of-array irradiance (array friendly)."""
    tilt = tilt_deg * D2R
    cos_aoi = (
        np.cos(tilt) * np.cos(np.asarray(zenith_deg) * D2R)
        + np.sin(tilt)
        * np.sin(np.asarray(zenith_deg) * D2R)
        * np.cos((np.asarray(azimuth_deg) - orientation_deg) * D2R)
    )
    beam = np.asarray(dni) * np.maximum(cos_aoi, 0.0)
    sky = np.asarray(dhi) * (1.0 + np.cos(tilt)) / 2.0
    ground = np.asarray(ghi) * albedo * (1.0 - np.cos(tilt)) / 2.0
    return np.maximum(beam + sky + ground, 0.0)[()]


def poa_irradiance(w: WeatherRecord, angles, p: PvParams,
                   albedo: float = ALBEDO_DEFAULT) -> float:
    """Plane-of-array irradiance for one weather record [W/m2]."""
    if not 0.0 <= albedo <= 1.0:
        raise ValueError("albedo must lie in [0, 1]")
    return float(
        poa_transposition(w.dni, w.dhi, w.ghi, angles.zenith, angles.azimuth,
                          p.tilt, p.orientation, albedo)
    )


def cell_temperature(poa, ambient, wind):
    """Sandia module temperature plus conduction offset [degC]."""
    poa_arr = np.asarray(poa, dtype=np.float64)
    module = poa_arr * np.exp(SANDIA_A + SANDIA_B * np.asarray(wind)) + np.asarray(ambient)
    return (module + poa_arr / 1000.0 * SANDIA_DELTA_T)[()]


def pv_power(i_tr, t_cell, p: PvParams):
    """DC power [kW], clamped at zero from below."""
    raw = (
        np.asarray(i_tr, dtype=np.float64)
        / p.e_ref
        * p.dc_rating
        * (1.0 + p.gamma * (np.asarray(t_cell) - p.t_ref))
    )
    return np.maximum(raw, 0.0)[()]


def _power_series(p: PvParams, loc: SiteLocation, index64,
                  dni, dhi, ghi, ambient, wind, albedo=ALBEDO_DEFAULT):
    zenith, azimuth = zenith_azimuth_series(loc, index64)
    poa = poa_transposition(dni, dhi, ghi, zenith, azimuth,
                            p.tilt, p.orientation, albedo)
    power = pv_power(poa, cell_temperature(poa, ambient, wind), p)
    return np.where(zenith >= 90.0, 0.0, power)


def synthesize_proxy(p: PvParams, loc: SiteLocation,
                     weather: WeatherBundle) -> TimeSeries:
    """PV generation series from measured weather [kW].

    Output is zero whenever the sun is below the horizon regardless of
    the reported irradiance.
    """
    temp, wind, dni, dhi, ghi = weather.require("temp", "wind", "dni", "dhi", "ghi")
    power = _power_series(
        p, loc, temp.index64(),
        dni.values, dhi.values, ghi.values, temp.values, wind.values,
    )
    return temp.with_values(power, Unit.KW)


def max_generation(p: PvParams, loc: SiteLocation,
                   ambient: TimeSeries) -> TimeSeries:
    """Clear-sky potential generation [kW] given only ambient temperature."""
    index64 = ambient.index64()
    zenith, _ = zenith_azimuth_series(loc, index64)
    dni, dhi, ghi = clear_sky_arrays(zenith)
    power = _power_series(p, loc, index64, dni, dhi, ghi,
                          ambient.values, MAX_GEN_WIND_MS)
    return ambient.with_values(power, Unit.KW)
