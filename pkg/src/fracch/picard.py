"""Solution construction by iterated linear transport problems.

Starting from ``u^0 = 0``, iterate

    u^{n+1}_t + u^n u^{n+1}_x = F(u^n),    u^{n+1}(0) = S_{n+1} u_0,

with the source

    F(u) = -[L, u d_x] m - 2 L(u_x m),    m = L^{-1} u,  L = (1 - d_xx)^(-a).

At a fixed point ``u_t + u u_x = F(u)`` is exactly the momentum equation
rewritten in terms of ``u``. Successive differences are measured in a Besov
norm and the contraction ratio is reported.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .dynamics import SimConfig, simulate
from .grid import Field, PeriodicGrid, SpectralOps, helmholtz_apply, helmholtz_invert
from .littlewood_paley import (BesovParams, besov_norm, build_partition, low_freq_truncate,
                               paraproduct, remainder)
from .trajectory import Trajectory

log = logging.getLogger(__name__)

TimeField = Union[Trajectory, Callable[[float], np.ndarray]]


class PicardDivergence(RuntimeError):
    def __init__(self, ratios, reason="successive differences grew three times in a row"):
        self.ratios = list(ratios)
        self.reason = reason
        super().__init__(f"{reason}: ratios " + ", ".join(f"{r:.3g}" for r in self.ratios))


@dataclass(frozen=True)
class PicardConfig:
    """``T`` is the horizon of every linear solve, ``dt`` its fixed RK4 step.

    Iteration stops at ``n_max`` iterates or once the successive difference
    drops below ``tol``. ``rho`` is the ratio below which the tail counts as
    geometric contraction.
    """

    a: float = 1.5
    T: float = 1.0
    n_max: int = 16
    dt: float = 0.02
    besov: BesovParams = BesovParams(1.5, 2.0, 1.0)
    tol: float = 1e-11
    rho: float = 0.7

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"picard horizon must be positive, got {self.T}")
        if self.n_max < 2:
            raise ValueError(f"n_max must be >= 2, got {self.n_max}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")


def _terms(ops: SpectralOps, u: np.ndarray):
    m = ops.m_of_u(u)
    return m, ops.dx(u), ops.dx(m)


def _source(ops: SpectralOps, u: np.ndarray) -> np.ndarray:
    m, ux, mx = _terms(ops, u)
    return u * ux - ops.u_of_m(u * mx) - 2.0 * ops.u_of_m(ux * m)


def commutator(u: Field, a: float) -> Field:
    """``[(1 - d_xx)^(-a), u d_x] m`` with ``m = (1 - d_xx)^a u``."""
    ops = SpectralOps(u.grid, a)
    m, ux, mx = _terms(ops, u.values)
    return Field(u.grid, ops.u_of_m(u.values * mx) - u.values * ux)


def commutator_bony(u: Field, a: float) -> Field:
    """The same commutator assembled from paraproducts and remainders:

    ``[L, T_u d_x] m + L T_{m_x} u - T_{u_x} u + L R(u, m_x) - R(u, u_x)``.
    """
    m = helmholtz_apply(u, a)
    mx = Field(u.grid, SpectralOps(u.grid, a).dx(m.values))
    ux = helmholtz_invert(mx, a)
    first = helmholtz_invert(paraproduct(u, mx), a) - paraproduct(u, ux)
    return (first + helmholtz_invert(paraproduct(mx, u), a) - paraproduct(ux, u)
            + helmholtz_invert(remainder(u, mx), a) - remainder(u, ux))


def source_term(u: Field, a: float) -> Field:
    """``F(u) = u u_x - L(u m_x) - 2 L(u_x m)``, ``L = (1 - d_xx)^(-a)``."""
    ops = SpectralOps(u.grid, a)
    out = _source(ops, u.values)
    bad = np.flatnonzero(~np.isfinite(out))
    if bad.size:
        raise FloatingPointError(f"non-finite source term at index {int(bad[0])}")
    return Field(u.grid, out)


def _as_time_field(f, T):
    if isinstance(f, Trajectory):
        if f.t0 > 0 or f.t1 < T * (1 - 1e-12):
            raise ValueError(f"time-sampled field covers [{f.t0}, {f.t1}], need [0, {T}]")
        return f
    if callable(f):
        return f
    v = np.asarray(f, dtype=float)
    return lambda t: v


def linear_transport_solve(advector: TimeField, source: TimeField, init: Field,
                           dt: float, T: float) -> Trajectory:
    """RK4 method of lines for ``w_t + A(t, x) w_x = S(t, x)``.

    ``advector`` and ``source`` are trajectories (interpolated in time),
    callables of ``t`` or fixed arrays. Returns the solution at the uniform
    step stamps, with time derivatives for Hermite interpolation.
    """
    grid = init.grid
    ops = SpectralOps(grid, 0.0)
    A = _as_time_field(advector, T)
    S = _as_time_field(source, T)

    @np.errstate(over="ignore", invalid="ignore")
    def f(t, w):
        return -A(t) * ops.dx(w) + S(t)

    n = max(1, int(math.ceil(T / dt - 1e-9)))
    h = T / n
    w = init.values.copy()
    times, vals, ders = [0.0], [w], []
    for i in range(n):
        t = i * h
        k1 = f(t, w)
        ders.append(k1)
        k2 = f(t + h / 2, w + h / 2 * k1)
        k3 = f(t + h / 2, w + h / 2 * k2)
        k4 = f(t + h, w + h * k3)
        w = w + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(w)):
            raise FloatingPointError(f"linear transport solution non-finite at t={t + h:.6g}")
        times.append(T if i == n - 1 else (i + 1) * h)
        vals.append(w)
    ders.append(f(T, w))
    return Trajectory(times, vals, ders)


@dataclass
class IterateRecord:
    n: int
    trajectory: Trajectory
    diff: float = float("nan")   # sup_t ||u^n - u^{n-1}||
    sup_norm: float = float("nan")  # sup_t ||u^n||


@dataclass
class PicardResult:
    config: PicardConfig
    records: list = field(default_factory=list)
    diffs: list = field(default_factory=list)
    converged: bool = False

    @property
    def ratios(self) -> np.ndarray:
        d = np.asarray(self.diffs)
        return d[1:] / d[:-1]

    def tail_ratios(self, k: int = 3, floor: float = 1e-13) -> np.ndarray:
        """Last ``k`` ratios among differences still above ``floor``."""
        d = np.asarray(self.diffs)
        d = d[d > floor * max(d.max(), 1e-300)] if d.size else d
        r = d[1:] / d[:-1]
        return r[-k:]

    @property
    def geometric(self) -> bool:
        r = self.tail_ratios()
        return bool(r.size and np.all(r <= self.config.rho))

    @property
    def final(self) -> Trajectory:
        return self.records[-1].trajectory

    def sup_norms(self) -> np.ndarray:
        return np.array([r.sup_norm for r in self.records[1:]])

    def fitted_constant(self, u0_norm: float) -> tuple[float, float]:
        """Smallest ``C`` with ``sup_n ||u^n|| <= C q / (1 - C T q^2)``, ``q = ||u0||``.

        Returns ``(C, T_window)`` with ``T_window = 1 / (C q^2)``; the fitted
        constant is empirical, not a proof constant.
        """
        q = u0_norm
        if q == 0:
            return 0.0, math.inf
        R = float(self.sup_norms().max()) / q
        C = R / (1.0 + R * self.config.T * q * q)
        return C, 1.0 / (C * q * q)


def _sup_besov(grid, values, params):
    return max(besov_norm(Field(grid, v), params) for v in values)


def iterate(u0: Field, config: PicardConfig) -> PicardResult:
    """Run the scheme from ``u^0 = 0`` with data ``S_n u0`` for the ``n``-th iterate."""
    grid = u0.grid
    ops = SpectralOps(grid, config.a)
    jmax = build_partition(grid).jmax
    zero = Trajectory.constant(np.zeros(grid.N), 0.0, config.T)
    result = PicardResult(config, [IterateRecord(0, zero, sup_norm=0.0)])
    prev = zero
    growth = 0
    for n in range(1, config.n_max + 1):
        adv = prev
        init = low_freq_truncate(u0, min(n, jmax))
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                nxt = linear_transport_solve(adv, lambda t, adv=adv: _source(ops, adv(t)),
                                             init, config.dt, config.T)
        except FloatingPointError as err:
            raise PicardDivergence(result.ratios, f"iterate {n} overflowed ({err})") from err
        diff = (_sup_besov(grid, nxt.values - prev.values, config.besov)
                if len(prev) == len(nxt) else
                _sup_besov(grid, nxt.values, config.besov))
        rec = IterateRecord(n, nxt, diff, _sup_besov(grid, nxt.values, config.besov))
        result.records.append(rec)
        result.diffs.append(diff)
        log.debug("picard n=%d d=%.3e", n, diff)
        if len(result.diffs) > 1 and result.diffs[-1] > result.diffs[-2]:
            growth += 1
            if growth >= 3:
                raise PicardDivergence(result.ratios)
        else:
            growth = 0
        prev = nxt
        if diff < config.tol:
            result.converged = True
            break
    return result


def cross_check(u0: Field, config: PicardConfig, result: PicardResult | None = None) -> float:
    """Sup-norm gap at ``T`` between the last iterate and the direct m-evolution."""
    result = result or iterate(u0, config)
    m0 = helmholtz_apply(u0, config.a)
    rep = simulate(m0, SimConfig(a=config.a, T=config.T, dt=config.dt, dealias=False,
                                 diagnostics_every=config.T))
    u_direct = helmholtz_invert(rep.final.m, config.a).values
    return float(np.max(np.abs(result.final.values[-1] - u_direct)))
