"""Deterministic seed derivation.

Every stochastic component (scenario fields, proxy draws, per-iteration
forest refits, random weight initialization) takes a seed derived from a
master seed and a fixed tuple of integer tags, so reruns are bitwise
reproducible and parallel schedules cannot reorder randomness.
"""
from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


def derive_seed(master: int, *tags: int) -> int:
    """Mix a master seed with integer tags into a fresh 63-bit seed."""
    state = (int(master) + _GOLDEN) & _MASK
    acc = _splitmix64(state)
    for tag in tags:
        state = (state + _GOLDEN * (int(tag) * 2 + 3)) & _MASK
        acc = _splitmix64(acc ^ _splitmix64(state))
    return acc & (_MASK >> 1)
