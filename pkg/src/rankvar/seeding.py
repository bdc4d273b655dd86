"""Deterministic 64-bit seed derivation for independent work cells."""

from __future__ import annotations

_MASK = 0xFFFFFFFFFFFFFFFF


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix_seed(base: int, *parts: int) -> int:
    """Hash a base seed with integer coordinates into a fresh 64-bit seed.

    Distinct coordinate tuples map to (statistically) independent seeds,
    so grid cells can be sampled in any order or in parallel without
    coordination.
    """
    state = _splitmix64(int(base) & _MASK)
    for part in parts:
        state = _splitmix64(state ^ (int(part) & _MASK))
    return state
