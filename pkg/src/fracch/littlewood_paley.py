"""Dyadic Littlewood-Paley blocks, Besov norms and Bony's paraproduct.

The low-frequency cutoff is ``chi(xi) = psi(|xi|)`` where ``psi`` equals 1 on
``[0, 3/4]``, 0 on ``[4/3, inf)`` and is glued smoothly in between with the
usual ``exp(-1/t)`` construction. Annular cutoffs are ``phi(xi) = chi(xi/2) -
chi(xi)``, which telescopes into an exact partition of unity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .grid import Field, PeriodicGrid

_INNER = 0.75
_OUTER = 4.0 / 3.0


def _glue(t):
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def chi(xi) -> np.ndarray:
    """Smooth radial cutoff: 1 for ``|xi| <= 3/4``, 0 for ``|xi| >= 4/3``."""
    r = np.abs(np.asarray(xi, dtype=float))
    t = (_OUTER - r) / (_OUTER - _INNER)
    a, b = _glue(t), _glue(1.0 - t)
    return a / (a + b)


def phi(xi) -> np.ndarray:
    return chi(np.asarray(xi, dtype=float) / 2) - chi(xi)


@dataclass(frozen=True)
class BesovParams:
    s: float
    p: float = 2.0
    r: float = 2.0

    def __post_init__(self):
        if not (self.p >= 1 and self.r >= 1):
            raise ValueError(f"Besov exponents need p, r >= 1, got p={self.p}, r={self.r}")


class DyadicPartition:
    """The ``chi`` / ``phi(2^-j .)`` family evaluated on a grid's wavenumbers.

    ``cutoff(j)`` is the spectral weight of block ``j`` for ``-1 <= j <= jmax``.
    """

    def __init__(self, grid: PeriodicGrid):
        self.grid = grid
        k = np.abs(grid.k)
        self.jmax = int(math.ceil(math.log2(k.max()))) + 1
        self._chi = chi(k)
        self._phi = np.array([phi(k / 2.0**j) for j in range(self.jmax + 1)])
        self._k = k

    def cutoff(self, j: int) -> np.ndarray:
        if j < -1 or j > self.jmax:
            raise ValueError(f"block index {j} outside [-1, {self.jmax}]")
        return self._chi if j == -1 else self._phi[j]

    def low(self, n: int) -> np.ndarray:
        """Spectral weight of ``S_n = sum_{j<n} Delta_j``, i.e. ``chi(2^-n k)``."""
        if n <= -1:
            return np.zeros_like(self._chi)
        return chi(self._k / 2.0**n)

    @cached_property
    def weights(self) -> np.ndarray:
        """All block weights stacked, row ``j + 1`` for block ``j``."""
        return np.vstack([self._chi[None, :], self._phi])

    def unity_defect(self) -> float:
        return float(np.max(np.abs(self.weights.sum(axis=0) - 1.0)))

    def square_sum(self) -> np.ndarray:
        return (self.weights**2).sum(axis=0)


_partitions: dict[PeriodicGrid, DyadicPartition] = {}


def build_partition(grid: PeriodicGrid) -> DyadicPartition:
    part = _partitions.get(grid)
    if part is None:
        part = _partitions[grid] = DyadicPartition(grid)
    return part


def block(f: Field, j: int) -> Field:
    """``Delta_j f``."""
    w = build_partition(f.grid).cutoff(j)
    return Field.from_spectrum(f.grid, f.spectrum * w)


def blocks(f: Field) -> np.ndarray:
    """Samples of every block, shape ``(jmax + 2, N)``; row 0 is ``Delta_{-1}``."""
    w = build_partition(f.grid).weights
    return np.fft.ifft(f.spectrum[None, :] * w * f.grid.N, axis=1).real


def low_freq_truncate(f: Field, n: int) -> Field:
    """``S_n f``; the identity once ``n > jmax``."""
    if n < 0:
        raise ValueError(f"truncation index must be >= 0, got {n}")
    part = build_partition(f.grid)
    w = part.low(n)
    if np.all(w == 1.0):
        return f
    return Field.from_spectrum(f.grid, f.spectrum * w)


def lp_norm(values: np.ndarray, dx: float, p: float) -> np.ndarray:
    """Rectangle-rule ``L^p`` norm along the last axis."""
    a = np.abs(values)
    if math.isinf(p):
        return a.max(axis=-1)
    return (dx * (a**p).sum(axis=-1)) ** (1.0 / p)


def block_norms(f: Field, params: BesovParams) -> tuple[np.ndarray, np.ndarray]:
    """Block indices ``j`` and weighted norms ``2^(js) ||Delta_j f||_p``."""
    b = blocks(f)
    j = np.arange(-1, b.shape[0] - 1)
    return j, 2.0 ** (j * params.s) * lp_norm(b, f.grid.dx, params.p)


def besov_norm(f: Field, params: BesovParams) -> float:
    _, w = block_norms(f, params)
    if math.isinf(params.r):
        return float(w.max())
    return float((w**params.r).sum() ** (1.0 / params.r))


def sobolev_norm(f: Field, s: float) -> float:
    """``(L sum (1 + k^2)^s |c_k|^2)^(1/2)``; equals the L2 norm at ``s = 0``."""
    g = f.grid
    return float(np.sqrt(g.L * np.sum((1 + g.k**2) ** s * np.abs(f.spectrum) ** 2)))


def _same_grid(u: Field, v: Field):
    if u.grid != v.grid:
        raise ValueError(f"grid mismatch: {u.grid} vs {v.grid}")


def paraproduct(u: Field, v: Field) -> Field:
    """``T_u v = sum_j S_{j-1} u * Delta_j v``."""
    _same_grid(u, v)
    bu, bv = blocks(u), blocks(v)
    low = np.cumsum(bu, axis=0)  # row i holds S_i u = sum_{j' < i} Delta_j'
    # block j sits in row j + 1; S_{j-1} u is row j - 1 of `low`
    out = np.zeros(u.grid.N)
    for j in range(1, bv.shape[0] - 1):
        out += low[j - 1] * bv[j + 1]
    return Field(u.grid, out)


def remainder(u: Field, v: Field) -> Field:
    """``R(u, v) = sum_{|j - j'| <= 1} Delta_j u * Delta_j' v``."""
    _same_grid(u, v)
    bu, bv = blocks(u), blocks(v)
    n = bu.shape[0]
    out = np.zeros(u.grid.N)
    for i in range(n):
        lo, hi = max(i - 1, 0), min(i + 2, n)
        out += bu[i] * bv[lo:hi].sum(axis=0)
    return Field(u.grid, out)
