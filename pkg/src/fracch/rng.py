"""Seeded random fields from the SplitMix64 generator.

SplitMix64 (Steele, Lea and Flood) is a 64-bit counter hashed by two
xor-shift-multiply rounds. It is trivial to reimplement in any language,
so seeded test fields are reproducible outside numpy.
"""
from __future__ import annotations

import numpy as np

from .grid import Field, PeriodicGrid

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed: int, n: int) -> np.ndarray:
    """The first ``n`` outputs of SplitMix64 started at state ``seed``."""
    with np.errstate(over="ignore"):
        z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + _GOLDEN * np.arange(1, n + 1, dtype=np.uint64)
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def uniform(seed: int, n: int) -> np.ndarray:
    """``n`` doubles in ``[0, 1)`` from the top 53 bits."""
    return (splitmix64(seed, n) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def normal(seed: int, n: int) -> np.ndarray:
    """Box-Muller standard normals."""
    h = (n + 1) // 2
    u = uniform(seed, 2 * h)
    r = np.sqrt(-2.0 * np.log1p(-u[:h]))
    th = 2 * np.pi * u[h:]
    return np.concatenate([r * np.cos(th), r * np.sin(th)])[:n]


def random_field(grid: PeriodicGrid, seed: int, kmax: int = 32, decay: float = 8.0,
                 parity: str | None = None, amplitude: float = 1.0) -> Field:
    """Band-limited random field with modes ``1 <= n <= kmax`` weighted ``exp(-n/decay)``.

    ``parity="odd"`` keeps only sines, ``"even"`` only cosines; the result is
    scaled to sup norm ``amplitude``. Mean zero.
    """
    if kmax < 1 or kmax >= grid.N // 2:
        raise ValueError(f"kmax must lie in [1, {grid.N // 2 - 1}], got {kmax}")
    z = normal(seed, 2 * kmax)
    c = np.zeros(grid.N // 2 + 1, dtype=complex)
    w = np.exp(-np.arange(1, kmax + 1) / decay)
    re, im = z[:kmax] * w, z[kmax:] * w
    if parity == "odd":
        re = 0 * re
    elif parity == "even":
        im = 0 * im
    elif parity is not None:
        raise ValueError(f"parity must be 'odd', 'even' or None, got {parity!r}")
    c[1: kmax + 1] = re + 1j * im
    v = np.fft.irfft(c, grid.N)
    peak = np.max(np.abs(v))
    return Field(grid, amplitude * v / peak if peak > 0 else v)
