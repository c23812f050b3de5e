"""Periodic grid, Fourier transforms and spectral multipliers.

All transforms use the convention that the zeroth coefficient is the mean of
the samples, i.e. ``c = fft(f) / N``. Wavenumbers are stored in numpy FFT
order, so ``grid.k[n]`` is the angular wavenumber of ``c[n]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform lattice ``x_j = j L / N`` on the torus of length ``L``."""

    N: int
    L: float = 40.0

    def __post_init__(self):
        N = int(self.N)
        if N < 8 or N & (N - 1):
            raise ValueError(f"N must be a power of two >= 8, got {self.N}")
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "L", float(self.L))

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.N) * self.dx

    @property
    def xc(self) -> np.ndarray:
        """Sample points wrapped into ``[-L/2, L/2)``; ``xc[0] == 0``."""
        x = self.x
        return np.where(x >= self.L / 2, x - self.L, x)

    @property
    def k(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.N, d=self.dx)

    @property
    def n(self) -> np.ndarray:
        """Integer mode index in ``[-N/2, N/2)``, FFT order."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N).astype(int)

    @property
    def kmax(self) -> float:
        return np.pi * self.N / self.L

    def reflect(self, f: np.ndarray) -> np.ndarray:
        """Return samples of ``f(-x)``."""
        return np.roll(f[::-1], 1, axis=-1)

    def field(self, values) -> "Field":
        return Field(self, values)

    def __call__(self, func: Callable[[np.ndarray], np.ndarray]) -> "Field":
        """Sample ``func`` on the centred coordinates."""
        return Field(self, func(self.xc))


def _hermitian_spectrum(v: np.ndarray) -> np.ndarray:
    """Full spectrum of real samples from ``rfft``, so ``c[-n] == conj(c[n])`` exactly."""
    N = v.shape[-1]
    h = np.fft.rfft(v) / N
    h[..., 0] = h[..., 0].real
    h[..., -1] = h[..., -1].real
    return np.concatenate([h, np.conj(h[..., 1:-1][..., ::-1])], axis=-1)


@dataclass(frozen=True, eq=False)
class Field:
    """Real samples of a grid function, with the spectrum computed eagerly."""

    grid: PeriodicGrid
    values: np.ndarray
    spectrum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.N,):
            raise ValueError(f"expected {self.grid.N} samples, got shape {v.shape}")
        check_finite(v)
        v.flags.writeable = False
        c = _hermitian_spectrum(v)
        c.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "spectrum", c)

    @classmethod
    def from_spectrum(cls, grid: PeriodicGrid, c: np.ndarray) -> "Field":
        return cls(grid, np.fft.ifft(np.asarray(c) * grid.N).real)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __len__(self):
        return self.grid.N

    def _wrap(self, other):
        if isinstance(other, Field):
            if other.grid != self.grid:
                raise ValueError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return Field(self.grid, self.values + self._wrap(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Field(self.grid, self.values - self._wrap(other))

    def __rsub__(self, other):
        return Field(self.grid, self._wrap(other) - self.values)

    def __mul__(self, other):
        return Field(self.grid, self.values * self._wrap(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, -self.values)

    def l2(self) -> float:
        return float(np.sqrt(self.grid.dx * np.sum(self.values**2)))

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def integral(self) -> float:
        return float(self.grid.dx * np.sum(self.values))


@dataclass(frozen=True)
class Multiplier:
    """Even Fourier multiplier ``sigma(k)``."""

    symbol: Callable[[np.ndarray], np.ndarray]
    label: str = ""

    def on(self, grid: PeriodicGrid) -> np.ndarray:
        s = np.asarray(self.symbol(grid.k), dtype=float)
        if not np.all(np.isfinite(s)):
            raise ValueError(f"multiplier {self.label!r} is not finite on the grid")
        return s

    def apply(self, f: Field) -> Field:
        return Field.from_spectrum(f.grid, f.spectrum * self.on(f.grid))


def helmholtz_symbol(a: float) -> Multiplier:
    """Symbol of ``(1 - d_xx)^a``."""
    return Multiplier(lambda k: (1.0 + k**2) ** a, f"(1-dxx)^{a:g}")


def check_finite(v: np.ndarray, what: str = "sample"):
    bad = np.flatnonzero(~np.isfinite(v))
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"non-finite {what} at index {i}: {v[i]!r}")


def forward_transform(f: Field) -> np.ndarray:
    """Fourier coefficients of ``f`` with ``c[0]`` equal to the sample mean."""
    return f.spectrum.copy()


def inverse_transform(grid: PeriodicGrid, c: np.ndarray) -> Field:
    return Field.from_spectrum(grid, c)


def derivative_symbol(grid: PeriodicGrid, order: int) -> np.ndarray:
    if order < 1:
        raise ValueError(f"derivative order must be >= 1, got {order}")
    d = (1j * grid.k) ** order
    if order % 2:
        d[grid.N // 2] = 0.0
    return d


def derivative(f: Field, order: int = 1) -> Field:
    """Spectral derivative; the Nyquist mode is dropped for odd orders."""
    return Field.from_spectrum(f.grid, f.spectrum * derivative_symbol(f.grid, order))


def helmholtz_apply(f: Field, a: float) -> Field:
    """``(1 - d_xx)^a f``."""
    return Field.from_spectrum(f.grid, f.spectrum * (1.0 + f.grid.k**2) ** a)


def helmholtz_invert(f: Field, a: float) -> Field:
    """``(1 - d_xx)^(-a) f``."""
    return Field.from_spectrum(f.grid, f.spectrum * (1.0 + f.grid.k**2) ** (-a))


class SpectralOps:
    """Array-level kernels shared by the time steppers.

    Works on raw sample arrays to keep the inner loops free of wrapper
    allocation; the public ``Field`` functions above are the reference API.
    """

    def __init__(self, grid: PeriodicGrid, a: float, dealias: bool = False):
        self.grid = grid
        self.a = float(a)
        k = grid.k
        self.ik = derivative_symbol(grid, 1)
        self.inv = (1.0 + k**2) ** (-self.a)
        self.fwd = (1.0 + k**2) ** self.a
        self.mask = (np.abs(grid.n) <= grid.N // 3).astype(float) if dealias else None

    def u_of_m(self, m):
        return np.fft.irfft(np.fft.rfft(m) * self.inv[: self.grid.N // 2 + 1], self.grid.N)

    def m_of_u(self, u):
        return np.fft.irfft(np.fft.rfft(u) * self.fwd[: self.grid.N // 2 + 1], self.grid.N)

    def dx(self, f):
        h = self.grid.N // 2 + 1
        return np.fft.irfft(np.fft.rfft(f) * self.ik[:h], self.grid.N)

    def truncate(self, f):
        if self.mask is None:
            return f
        h = self.grid.N // 2 + 1
        return np.fft.irfft(np.fft.rfft(f) * self.mask[:h], self.grid.N)
