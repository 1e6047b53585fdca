"""Uniform time-series container and elementary vector operators.

A :class:`TimeSeries` is an immutable, uniformly sampled sequence of
finite floats stamped in UTC. Two series are *aligned* iff they share
start, step and length; most numeric operations in this package require
alignment and raise :class:`~solardisagg.errors.Misaligned` otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone
from enum import Enum

import numpy as np

from .errors import (
    EmptyIntersection,
    GapTooLong,
    Misaligned,
    NonUniformStep,
    NotDivisible,
    StepMismatch,
)

SUPPORTED_STEPS = (1, 15, 30, 60)

#: Longest run of consecutive missing samples repaired by interpolation.
MAX_REPAIR_GAP = 4


class Unit(str, Enum):
    KW = "kw"
    DEG_C = "degc"
    W_PER_M2 = "w_per_m2"
    M_PER_S = "m_per_s"
    DIMENSIONLESS = "dimensionless"


@dataclass(frozen=True)
class SiteLocation:
    """Approximate site coordinates (city centroid) plus clock offset.

    ``utc_offset`` is only used to localize hour-of-day and weekday
    features; all series timestamps stay in UTC.
    """

    latitude: float
    longitude: float
    utc_offset: float = 0.0

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} outside [-180, 180]")
        if not -12.0 <= self.utc_offset <= 14.0:
            raise ValueError(f"utc_offset {self.utc_offset} outside [-12, 14]")


def _as_utc(t: datetime) -> datetime:
    if t.tzinfo is None:
        raise ValueError("timestamps must be timezone-aware")
    return t.astimezone(timezone.utc)


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled series of finite values, stamped at interval starts."""

    start: datetime
    step_minutes: int
    values: np.ndarray = field(repr=False)
    unit: Unit = Unit.DIMENSIONLESS

    def __post_init__(self):
        object.__setattr__(self, "start", _as_utc(self.start))
        if self.step_minutes not in SUPPORTED_STEPS:
            raise NonUniformStep(
                f"step {self.step_minutes} min not in {SUPPORTED_STEPS}"
            )
        vals = np.asarray(self.values, dtype=np.float64).copy()
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("values must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise ValueError(f"non-finite value at index {bad} ({self.at(bad)})")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "unit", Unit(self.unit))

    def __len__(self) -> int:
        return self.values.size

    @property
    def step(self) -> timedelta:
        return timedelta(minutes=self.step_minutes)

    @property
    def end(self) -> datetime:
        """Timestamp of the last sample."""
        return self.start + (len(self) - 1) * self.step

    def at(self, i: int) -> datetime:
        return self.start + i * self.step

    def index64(self) -> np.ndarray:
        """Timestamps as a ``datetime64[s]`` array (vectorized calendar math)."""
        t0 = np.datetime64(self.start.replace(tzinfo=None), "s")
        return t0 + np.arange(len(self), dtype=np.int64) * np.timedelta64(
            self.step_minutes * 60, "s"
        )

    def aligned_with(self, other: "TimeSeries") -> bool:
        return (
            self.start == other.start
            and self.step_minutes == other.step_minutes
            and len(self) == len(other)
        )

    def with_values(self, values: np.ndarray, unit: Unit | None = None) -> "TimeSeries":
        """Same grid, new values (and optionally a new unit)."""
        return replace(self, values=np.asarray(values, dtype=np.float64),
                       unit=self.unit if unit is None else unit)

    def slice(self, first: int, length: int) -> "TimeSeries":
        """Contiguous sub-window starting at sample index ``first``."""
        if first < 0 or length < 1 or first + length > len(self):
            raise ValueError(f"slice [{first}, {first + length}) outside series")
        return replace(self, start=self.at(first),
                       values=self.values[first:first + length])


def require_aligned(*series: TimeSeries) -> None:
    ref = series[0]
    for s in series[1:]:
        if not ref.aligned_with(s):
            raise Misaligned(
                f"series not aligned: ({ref.start}, {ref.step_minutes}m, n={len(ref)})"
                f" vs ({s.start}, {s.step_minutes}m, n={len(s)})"
            )


def align(series_list: list[TimeSeries]) -> list[TimeSeries]:
    """Trim all series to their common window.

    All inputs must share the sampling step and lie on the same grid
    phase; the output series are mutually aligned. Values are never
    interpolated or fabricated, only dropped.
    """
    if not series_list:
        raise ValueError("align requires at least one series")
    step = series_list[0].step_minutes
    for s in series_list[1:]:
        if s.step_minutes != step:
            raise StepMismatch(f"steps differ: {step} vs {s.step_minutes} min")
    start = max(s.start for s in series_list)
    end = min(s.end for s in series_list)
    if end < start:
        raise EmptyIntersection("series share no common time window")
    step_td = timedelta(minutes=step)
    for s in series_list:
        off = (start - s.start) % step_td
        if off:
            raise EmptyIntersection(
                f"grids are phase-shifted by {off} at common start {start}"
            )
    out = []
    for s in series_list:
        first = (start - s.start) // step_td
        length = (end - start) // step_td + 1
        out.append(s.slice(first, length))
    return out


def upsample_linear(s: TimeSeries, target_step: int) -> TimeSeries:
    """Linearly interpolate to a finer step that divides the current one.

    Original samples are preserved at their timestamps; no extrapolation
    happens past the last sample, so the output has
    ``(len - 1) * ratio + 1`` samples.
    """
    if target_step not in SUPPORTED_STEPS:
        raise NonUniformStep(f"step {target_step} min not in {SUPPORTED_STEPS}")
    if s.step_minutes % target_step != 0:
        raise NotDivisible(
            f"target step {target_step} does not divide {s.step_minutes}"
        )
    ratio = s.step_minutes // target_step
    if ratio == 1:
        return s
    n = len(s)
    fine = np.arange((n - 1) * ratio + 1, dtype=np.float64) / ratio
    vals = np.interp(fine, np.arange(n, dtype=np.float64), s.values)
    # exact sample preservation, immune to interp rounding
    vals[::ratio] = s.values
    return TimeSeries(s.start, target_step, vals, s.unit)


def truncate_nonneg(v: TimeSeries) -> TimeSeries:
    """Elementwise ``max(value, 0)`` (the positive-part operator)."""
    return v.with_values(np.maximum(v.values, 0.0))


def from_samples(
    samples: list[tuple[datetime, float]],
    unit: Unit = Unit.DIMENSIONLESS,
) -> TimeSeries:
    """Build a series from (timestamp, value) pairs with gap repair.

    Rows are sorted by timestamp. The step is the smallest observed
    spacing and must be a supported step; every other spacing must be a
    multiple of it. Runs of up to :data:`MAX_REPAIR_GAP` missing samples
    are filled by linear interpolation; longer runs abort with
    :class:`~solardisagg.errors.GapTooLong` naming the first missing
    timestamp. Duplicate timestamps must be rejected by the caller
    (the CSV reader reports them with line numbers).
    """
    if not samples:
        raise ValueError("no samples")
    rows = sorted(((_as_utc(t), float(v)) for t, v in samples), key=lambda r: r[0])
    if len(rows) == 1:
        raise NonUniformStep("cannot infer step from a single sample")
    times = [r[0] for r in rows]
    diffs = [(b - a) for a, b in zip(times, times[1:])]
    min_minutes = min(diffs).total_seconds() / 60.0
    if min_minutes == int(min_minutes) and int(min_minutes) in SUPPORTED_STEPS:
        step_min = min_minutes
    else:
        # smallest spacing is itself gapped: take the coarsest supported
        # step that explains every spacing
        candidates = [
            s for s in sorted(SUPPORTED_STEPS, reverse=True)
            if all((d.total_seconds() / 60.0) % s == 0 for d in diffs)
        ]
        if not candidates:
            raise NonUniformStep(
                f"no supported step {SUPPORTED_STEPS} explains spacing "
                f"{min_minutes:g} min"
            )
        step_min = float(candidates[0])
    step_td = timedelta(minutes=step_min)
    out_vals: list[float] = [rows[0][1]]
    for (t0, v0), (t1, v1), d in zip(rows, rows[1:], diffs):
        if d % step_td:
            raise NonUniformStep(
                f"timestamp {t1.isoformat()} is off the {int(step_min)}-min grid"
            )
        missing = d // step_td - 1
        if missing > MAX_REPAIR_GAP:
            first_bad = t0 + step_td
            raise GapTooLong(
                f"{missing} consecutive samples missing starting at "
                f"{first_bad.strftime('%Y-%m-%dT%H:%M:%SZ')}"
            )
        for k in range(1, missing + 1):
            out_vals.append(v0 + (v1 - v0) * k / (missing + 1))
        out_vals.append(v1)
    return TimeSeries(times[0], int(step_min), np.asarray(out_vals), unit)
