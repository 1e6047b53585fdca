"""Exception hierarchy for the disaggregation pipeline.

Three families matter to callers: usage/configuration problems,
data problems, and algorithmic non-convergence. The CLI maps them
to exit codes 1, 2 and 3 respectively.
"""
from __future__ import annotations


class SolarDisaggError(Exception):
    """Base class for all package errors."""


class UsageError(SolarDisaggError):
    """Bad CLI arguments or an invalid run configuration."""


class ConfigError(UsageError):
    """Run configuration references missing files or violates setting rules."""


class DataError(SolarDisaggError):
    """Input data violates a precondition or a file format rule."""


class ParseError(DataError):
    """Malformed CSV content; message names the offending line."""


class UnitUnknown(DataError):
    """CSV header carries an unrecognized unit token."""


class NonUniformStep(DataError):
    """Timestamps do not lie on a uniform grid of a supported step."""


class GapTooLong(DataError):
    """More than the repairable number of consecutive samples are missing."""


class EmptyIntersection(DataError):
    """Series share no common aligned window."""


class StepMismatch(DataError):
    """Series have different sampling steps."""


class NotDivisible(DataError):
    """Upsampling target step does not divide the source step."""


class Misaligned(DataError):
    """Series expected to be aligned differ in start, step or length."""


class MissingChannel(DataError):
    """A required weather channel is absent from the bundle."""


class NoNightIntervals(DataError):
    """Window contains no night-time samples for base-load estimation."""


class InsufficientData(DataError):
    """Too little usable data for parameter estimation."""


class DegenerateGeneration(DataError):
    """Generation envelope is identically zero."""


class ZeroProxy(DataError):
    """Proxy maximum-generation series is identically zero."""


class DimensionMismatch(DataError):
    """Matrix/vector shapes are incompatible."""


class TooFewRows(DataError):
    """Not enough training rows for the load model."""


class SchemaMismatch(DataError):
    """Feature schema differs between fit and predict."""


class ZeroMeanTruth(DataError):
    """Normalized error is undefined for a zero-mean reference signal."""


class PoolTooSmall(DataError):
    """Not enough homes to draw the requested number of real proxies."""


class LengthTooLong(DataError):
    """Requested disaggregation length exceeds the scenario window."""


class NonConvergence(SolarDisaggError):
    """The alternating loop diverged; carries the weight trajectory."""

    def __init__(self, message: str, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory if trajectory is not None else []
