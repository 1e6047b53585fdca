"""Base-load, approximate target solar, and PV parameter estimation.

The parameter estimator recovers (tilt, orientation, dc_rating) from a
generation series by matching the per-time-of-day upper envelope of the
observations against candidate clear-sky curves on a 5-degree grid,
with the rating solved in closed form for each candidate. The envelope
is the natural clear-sky estimator when the series mixes clear and
cloudy days.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateGeneration,
    InsufficientData,
    NoNightIntervals,
)
from .pvmodel import (
    MAX_GEN_WIND_MS,
    PvParams,
    cell_temperature,
    poa_transposition,
    pv_power,
)
from .solargeo import clear_sky_arrays, night_mask, zenith_azimuth_series
from .timeseries import SiteLocation, TimeSeries, require_aligned, truncate_nonneg

ORIENTATION_STEP_DEG = 5.0
TILT_STEP_DEG = 5.0
TILT_MAX_DEG = 60.0
MIN_GENERATION_DAYS = 5

#: Floor applied to the closed-form rating so PvParams stays valid.
MIN_DC_RATING_KW = 1e-6


@dataclass(frozen=True)
class BaseLoad:
    """Night-time base consumption level [kW] and its sample support."""

    value: float
    night_interval_count: int


def estimate_base_load(y: TimeSeries, loc: SiteLocation,
                       percentile: float | None = None) -> BaseLoad:
    """Minimum (or low percentile) of net load over night intervals.

    ``percentile`` in (0, 50] trades the exact minimum for robustness
    against spurious dips; None keeps the minimum.
    """
    night = night_mask(loc, y.index64())
    count = int(night.sum())
    if count == 0:
        raise NoNightIntervals("window contains no night intervals")
    night_vals = y.values[night]
    if percentile is None:
        value = float(night_vals.min())
    else:
        if not 0.0 < percentile <= 50.0:
            raise ValueError("percentile must lie in (0, 50]")
        value = float(np.percentile(night_vals, percentile))
    return BaseLoad(value=value, night_interval_count=count)


def approx_target_solar(y: TimeSeries, base: BaseLoad) -> TimeSeries:
    """Rough solar signal recovered from net load: positive part of (base - y)."""
    return truncate_nonneg(y.with_values(base.value - y.values))


def orientation_grid(hemisphere: str) -> np.ndarray:
    """Candidate surface azimuths in ascending numeric order [degrees]."""
    if hemisphere == "north":
        return np.arange(90.0, 270.0 + 0.5, ORIENTATION_STEP_DEG)
    if hemisphere == "south":
        east = np.arange(0.0, 90.0 + 0.5, ORIENTATION_STEP_DEG)
        west = np.arange(270.0, 360.0 - 0.5, ORIENTATION_STEP_DEG)
        return np.concatenate([east, west])
    raise ValueError(f"hemisphere must be 'north' or 'south', got {hemisphere!r}")


class _EnvelopeIndexer:
    """Maps a series index to per-time-of-day groups for fast envelopes."""

    def __init__(self, index64: np.ndarray, step_minutes: int):
        days = index64.astype("datetime64[D]")
        minutes = (index64 - days).astype("timedelta64[s]").astype(np.int64) // 60
        slots = (minutes // step_minutes).astype(np.int64)
        self.order = np.argsort(slots, kind="stable")
        sorted_slots = slots[self.order]
        self.starts = np.flatnonzero(
            np.r_[True, sorted_slots[1:] != sorted_slots[:-1]]
        )
        self.slots = sorted_slots[self.starts]

    def envelope(self, values: np.ndarray) -> np.ndarray:
        """Per-time-of-day maximum across days."""
        return np.maximum.reduceat(values[self.order], self.starts)


def _time_of_day_envelope(values: np.ndarray, index64: np.ndarray,
                          step_minutes: int) -> tuple[np.ndarray, np.ndarray]:
    idx = _EnvelopeIndexer(index64, step_minutes)
    return idx.slots, idx.envelope(values)


def fit_pv_params(gen: TimeSeries, loc: SiteLocation, ambient: TimeSeries,
                  hemisphere: str) -> PvParams:
    """Recover (tilt, orientation, dc_rating) from a generation series.

    Grid-searches orientation within hemisphere bounds and tilt in
    [0, 60] at 5-degree steps; for each candidate the rating comes from
    a closed-form least-squares match of the candidate's clear-sky
    envelope to the observed envelope. Ties break toward the lowest
    orientation, then the lowest tilt, so the result is deterministic.
    """
    require_aligned(gen, ambient)
    index64 = gen.index64()
    day_ids = index64.astype("datetime64[D]")
    gen_days = np.unique(day_ids[gen.values > 0.0])
    if gen_days.size < MIN_GENERATION_DAYS:
        raise InsufficientData(
            f"need >= {MIN_GENERATION_DAYS} days with nonzero generation, "
            f"got {gen_days.size}"
        )
    indexer = _EnvelopeIndexer(index64, gen.step_minutes)
    gen_env = indexer.envelope(gen.values)
    if not np.any(gen_env > 0.0):
        raise DegenerateGeneration("generation envelope is identically zero")

    zenith, azimuth = zenith_azimuth_series(loc, index64)
    dni, dhi, ghi = clear_sky_arrays(zenith)
    daylight = zenith < 90.0
    unit_rating = PvParams(tilt=0.0, orientation=0.0, dc_rating=1.0)

    best = None
    tilts = np.arange(0.0, TILT_MAX_DEG + 0.5, TILT_STEP_DEG)
    for orientation in orientation_grid(hemisphere):
        for tilt in tilts:
            poa = poa_transposition(dni, dhi, ghi, zenith, azimuth,
                                    tilt, orientation, albedo=0.2)
            power = pv_power(
                poa, cell_temperature(poa, ambient.values, MAX_GEN_WIND_MS),
                unit_rating,
            )
            power = np.where(daylight, power, 0.0)
            cand_env = indexer.envelope(power)
            denom = float(cand_env @ cand_env)
            if denom <= 0.0:
                continue
            scale = max(float(cand_env @ gen_env) / denom, MIN_DC_RATING_KW)
            sse = float(np.sum((scale * cand_env - gen_env) ** 2))
            if best is None or sse < best[0]:
                best = (sse, float(orientation), float(tilt), scale)
    if best is None:
        raise DegenerateGeneration("no candidate produces daytime generation")
    _, orientation, tilt, scale = best
    return PvParams(tilt=tilt, orientation=orientation, dc_rating=scale)


def hemisphere_of(loc: SiteLocation) -> str:
    return "north" if loc.latitude >= 0.0 else "south"
