"""Radial test profiles used by the conformance checks and the test suite."""
from __future__ import annotations

from typing import Callable, Dict, Optional

import numpy as np

from .spectral import RadialGrid, RadialProfile


def _gaussian(n):
    return lambda r: np.exp(-0.5 * r ** 2)


def _ring(n):
    return lambda r: r ** 2 * np.exp(-r ** 2)


def _algebraic(n):
    return lambda r: (1.0 + r ** 2) ** (-(n + 2) / 2.0)


def _exponential(n):
    return lambda r: np.exp(-r) * (1.0 + r)


def _two_scale(n):
    return lambda r: np.exp(-0.5 * r ** 2) + 0.3 * np.exp(-0.5 * (r / 4.0) ** 2)


def _tail_bump(n):
    return lambda r: np.exp(-0.5 * ((r - 100.0) / 20.0) ** 2)


PROFILES: Dict[str, Callable[[int], Callable]] = {
    "gaussian": _gaussian,
    "ring": _ring,
    "algebraic": _algebraic,
    "exponential": _exponential,
    "two_scale": _two_scale,
}
"""The standard corpus: smooth, nonnegative, decaying in both directions of ln r."""

EXTRA_PROFILES: Dict[str, Callable[[int], Callable]] = {"tail_bump": _tail_bump}
"""Profiles for truncation diagnostics; ``tail_bump`` lives near r = 100."""


def corpus_grid() -> RadialGrid:
    return RadialGrid.default()


def profile(name: str, n: int, grid: Optional[RadialGrid] = None) -> RadialProfile:
    table = {**PROFILES, **EXTRA_PROFILES}
    if name not in table:
        raise KeyError(f"unknown profile {name!r}; choose from {sorted(table)}")
    return RadialProfile.from_function(table[name](n), grid or corpus_grid(), n)


def corpus(n: int, grid: Optional[RadialGrid] = None, names=None) -> Dict[str, RadialProfile]:
    grid = grid or corpus_grid()
    return {k: profile(k, n, grid) for k in (names or PROFILES)}
