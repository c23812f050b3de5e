"""Time evolution of the momentum form

    m_t + u m_x + 2 u_x m = 0,    u = (1 - d_xx)^(-a) m

by Fourier pseudo-spectral method of lines and classical RK4.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .diagnostics import DiagnosticRow, measure, strip_width
from .grid import Field, PeriodicGrid, SpectralOps
from .littlewood_paley import BesovParams
from .trajectory import Trajectory

log = logging.getLogger(__name__)

EPS_FLOOR = 1e-12


class NonFiniteError(FloatingPointError):
    """A term of the right-hand side produced inf/nan."""

    def __init__(self, term, index):
        self.term = term
        self.index = index
        super().__init__(f"non-finite value in term {term!r} at index {index}")


@dataclass(frozen=True)
class BlowUpEvent:
    t: float
    x: float
    value: float
    reason: str = "threshold"

    def as_dict(self):
        return asdict(self)


class BlowUp(RuntimeError):
    def __init__(self, event: BlowUpEvent):
        self.event = event
        super().__init__(f"blow-up at t={event.t:.6g} ({event.reason})")


@dataclass(frozen=True)
class SimConfig:
    """Run parameters.

    ``dt`` set means a fixed step; otherwise ``dt = courant * dx / ||u||_inf``.
    ``diagnostics_every`` and ``snapshot_every`` are time intervals; steps are
    shortened to land on them exactly.

    ``strip_min > 0`` adds a second blow-up trigger: the estimated analyticity
    strip width falling below ``strip_min * dx``. Gradient growth at breaking
    saturates at the grid scale long before any fixed ``blowup_threshold``,
    whereas the strip collapse is resolution-independent.
    """

    a: float = 1.5
    T: float = 5.0
    courant: float = 0.5
    dt: Optional[float] = None
    dealias: bool = True
    blowup_threshold: float = 1e3
    diagnostics_every: float = 0.1
    snapshot_every: Optional[float] = None
    record_trajectory: bool = False
    besov: Optional[BesovParams] = None
    strip_min: float = 0.0

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")
        if not 0 < self.courant <= 1:
            raise ValueError(f"courant must lie in (0, 1], got {self.courant}")
        if not self.blowup_threshold > 0:
            raise ValueError(f"blowup_threshold must be positive, got {self.blowup_threshold}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.diagnostics_every > 0:
            raise ValueError("diagnostics_every must be positive")
        if self.snapshot_every is not None and not self.snapshot_every > 0:
            raise ValueError("snapshot_every must be positive")
        if not self.strip_min >= 0:
            raise ValueError(f"strip_min must be non-negative, got {self.strip_min}")


@dataclass(frozen=True)
class StepState:
    t: float
    m: Field


@dataclass
class RunReport:
    config: SimConfig
    m0: Field
    rows: list = field(default_factory=list)
    events: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    final: Optional[StepState] = None
    trajectory: Optional[Trajectory] = None
    steps: int = 0

    @property
    def blew_up(self) -> bool:
        return bool(self.events)

    @property
    def grid(self) -> PeriodicGrid:
        return self.m0.grid

    def column(self, name) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)


_ops_cache: dict = {}


def spectral_ops(grid: PeriodicGrid, a: float, dealias: bool) -> SpectralOps:
    key = (grid, float(a), bool(dealias))
    ops = _ops_cache.get(key)
    if ops is None:
        ops = _ops_cache[key] = SpectralOps(grid, a, dealias)
    return ops


def _check(term, v):
    if not np.all(np.isfinite(v)):
        raise NonFiniteError(term, int(np.flatnonzero(~np.isfinite(v))[0]))


@np.errstate(over="ignore", invalid="ignore")
def _rhs(ops: SpectralOps, m: np.ndarray) -> np.ndarray:
    u = ops.u_of_m(m)
    _check("u", u)
    mx = ops.dx(m)
    _check("m_x", mx)
    ux = ops.dx(u)
    _check("u_x", ux)
    out = -(u * mx + 2.0 * ux * m)
    _check("u m_x + 2 u_x m", out)
    return ops.truncate(out)


def rhs(m: Field, a: float, dealias: bool = True) -> Field:
    """``-(u m_x + 2 u_x m)`` with ``u = (1 - d_xx)^(-a) m``.

    Products are formed pointwise; with ``dealias`` the result is truncated
    to ``|n| <= N/3`` (the 2/3 rule, exact when ``m`` is itself truncated).
    """
    return Field(m.grid, _rhs(spectral_ops(m.grid, a, dealias), m.values))


@np.errstate(over="ignore", invalid="ignore")
def _rk4(ops, m, dt, k1=None):
    if k1 is None:
        k1 = _rhs(ops, m)
    k2 = _rhs(ops, m + 0.5 * dt * k1)
    k3 = _rhs(ops, m + 0.5 * dt * k2)
    k4 = _rhs(ops, m + dt * k3)
    return m + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _blowup_from(t, ops, err):
    return BlowUpEvent(t=float(t), x=float("nan"), value=float("inf"),
                       reason=f"non-finite stage: {err}")


def rk4_step(state: StepState, dt: float, config: SimConfig) -> StepState:
    """One classical Runge-Kutta step; a non-finite stage raises :class:`BlowUp`."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    ops = spectral_ops(state.m.grid, config.a, config.dealias)
    try:
        m = _rk4(ops, state.m.values, dt)
        _check("m", m)
    except NonFiniteError as err:
        raise BlowUp(_blowup_from(state.t, ops, err)) from err
    return StepState(state.t + dt, Field(state.m.grid, m))


def _cfl(grid, u_sup, courant):
    return courant * grid.dx / max(u_sup, EPS_FLOOR)


def cfl_dt(state: StepState, config: SimConfig, next_output: float | None = None) -> float:
    """Courant-limited step, never past ``next_output`` (default: ``T``)."""
    ops = spectral_ops(state.m.grid, config.a, config.dealias)
    if config.dt is not None:
        dt = config.dt
    else:
        dt = _cfl(state.m.grid, float(np.max(np.abs(ops.u_of_m(state.m.values)))), config.courant)
    stop = config.T if next_output is None else min(next_output, config.T)
    return min(dt, stop - state.t)


def detect_blowup(state: StepState, threshold: float, a: float,
                  dealias: bool = True) -> Optional[BlowUpEvent]:
    """Event carrying ``t``, the arg-max and ``||u_x||_inf`` once above ``threshold``."""
    ops = spectral_ops(state.m.grid, a, dealias)
    ux = ops.dx(ops.u_of_m(state.m.values))
    i = int(np.argmax(np.abs(ux)))
    if abs(ux[i]) > threshold:
        return BlowUpEvent(t=float(state.t), x=float(state.m.grid.xc[i]), value=float(abs(ux[i])))
    return None


def detect_strip_collapse(state: StepState, strip_min: float, a: float,
                          dealias: bool = True) -> Optional[BlowUpEvent]:
    """Event once the analyticity strip of ``m`` is narrower than ``strip_min`` cells."""
    grid = state.m.grid
    delta = strip_width(state.m.values, grid)
    if not delta < strip_min * grid.dx:
        return None
    ops = spectral_ops(grid, a, dealias)
    ux = ops.dx(ops.u_of_m(state.m.values))
    i = int(np.argmax(np.abs(ux)))
    return BlowUpEvent(t=float(state.t), x=float(grid.xc[i]), value=float(abs(ux[i])),
                       reason="analyticity strip collapse")


class _Clock:
    """Output instants k * every, merged."""

    def __init__(self, T, *periods):
        stamps = {T}
        for p in periods:
            if p:
                n = int(math.floor(T / p + 1e-9))
                stamps.update(round(i * p, 12) for i in range(1, n + 1))
        self.stamps = sorted(s for s in stamps if 0 < s <= T)

    def next_after(self, t):
        for s in self.stamps:
            if s > t * (1 + 1e-14) + 1e-14:
                return s
        return self.stamps[-1]


def _on_period(t, period):
    if not period:
        return False
    q = t / period
    return abs(q - round(q)) < 1e-9


def simulate(m0: Field, config: SimConfig) -> RunReport:
    """Integrate from ``m0`` to ``config.T`` or until a blow-up event.

    Deterministic: the step sequence depends only on ``m0`` and ``config``.
    """
    grid = m0.grid
    ops = spectral_ops(grid, config.a, config.dealias)
    m = ops.truncate(m0.values.copy())
    report = RunReport(config=config, m0=Field(grid, m))
    clock = _Clock(config.T, config.diagnostics_every, config.snapshot_every)
    t = 0.0
    report.rows.append(measure(t, m, ops, config.besov))
    if config.snapshot_every:
        report.snapshots.append(StepState(t, Field(grid, m)))
    times, ms, mts = [], [], []

    while t < config.T * (1 - 1e-14):
        nxt = clock.next_after(t)
        try:
            k1 = _rhs(ops, m)
        except NonFiniteError as err:
            report.events.append(_blowup_from(t, ops, err))
            break
        if config.record_trajectory:
            times.append(t)
            ms.append(m)
            mts.append(k1)
        if config.dt is not None:
            dt = config.dt
        else:
            dt = _cfl(grid, float(np.max(np.abs(ops.u_of_m(m)))), config.courant)
        if t + dt >= nxt - 1e-12 * max(1.0, nxt):
            dt, t_new = nxt - t, nxt
        else:
            t_new = t + dt
        try:
            m_new = _rk4(ops, m, dt, k1)
            _check("m", m_new)
        except NonFiniteError as err:
            report.events.append(_blowup_from(t, ops, err))
            break
        m, t = m_new, t_new
        report.steps += 1

        state = StepState(t, Field(grid, m))
        event = detect_blowup(state, config.blowup_threshold, config.a, config.dealias)
        if event is None and config.strip_min > 0:
            event = detect_strip_collapse(state, config.strip_min, config.a, config.dealias)
        if event is not None:
            report.rows.append(measure(t, m, ops, config.besov))
            report.events.append(event)
            log.info("blow-up detected at t=%.6g", t)
            break
        if t == nxt:
            if _on_period(t, config.diagnostics_every) or t == config.T:
                report.rows.append(measure(t, m, ops, config.besov))
            if _on_period(t, config.snapshot_every) or (config.snapshot_every and t == config.T):
                report.snapshots.append(StepState(t, Field(grid, m)))

    report.final = StepState(t, Field(grid, m))
    if config.record_trajectory:
        if not report.events:
            times.append(t)
            ms.append(m)
            mts.append(_rhs(ops, m))
        report.trajectory = Trajectory(times, ms, mts)
    return report
