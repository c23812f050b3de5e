"""Characteristic curves and the Lagrangian form of the momentum equation.

Along ``q_t = u(t, q)`` the momentum equation integrates to

    m(t, q(t, xi)) * q_xi(t, xi)^2 = m0(xi),

independently of the order ``a``. That identity carries both the sign
argument (``m0 >= 0`` stays non-negative) and the half-line sign pattern of
odd data, and is checked here against simulated trajectories.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Field, PeriodicGrid
from .trajectory import Trajectory

DEFECT_FLOOR = 1e-300


def trig_eval(grid: PeriodicGrid, values: np.ndarray, points: np.ndarray, deriv: bool = False):
    """Trigonometric interpolant of ``values`` (and optionally its derivative) at ``points``.

    Direct sum, ``O(N)`` per point, using powers of ``exp(2 pi i q / L)``
    rather than one complex exponential per term. The Nyquist mode enters as
    a cosine so the interpolant is real.
    """
    N = grid.N
    h = N // 2
    c = np.fft.fft(values) / N
    points = np.asarray(points, dtype=float)
    z = np.exp(2j * np.pi * points / grid.L)
    Z = np.cumprod(np.broadcast_to(z[:, None], (points.size, h - 1)), axis=1)
    kn = np.pi * N / grid.L
    nyq = c[h].real
    f = c[0].real + 2 * (Z @ c[1:h]).real + nyq * np.cos(kn * points)
    if not deriv:
        return f
    ikc = 1j * grid.k[1:h] * c[1:h]
    fx = 2 * (Z @ ikc).real - nyq * kn * np.sin(kn * points)
    return f, fx


def velocity_trajectory(m_traj: Trajectory, grid: PeriodicGrid, a: float) -> Trajectory:
    """``u = (1 - d_xx)^(-a) m`` applied stamp by stamp (values and time derivatives)."""
    sym = (1.0 + grid.k**2) ** (-a)

    def inv(v):
        return np.fft.ifft(np.fft.fft(v, axis=-1) * sym, axis=-1).real

    d = None if m_traj.derivs is None else inv(m_traj.derivs)
    return Trajectory(m_traj.times, inv(m_traj.values), d)


@dataclass
class FlowMap:
    times: np.ndarray
    labels: np.ndarray
    q: np.ndarray
    q_xi: np.ndarray
    events: list = field(default_factory=list)

    def at(self, t):
        i = int(np.argmin(np.abs(self.times - t)))
        return self.q[i], self.q_xi[i]

    def label_index(self, xi):
        hits = np.flatnonzero(self.labels == xi)
        if not hits.size:
            raise ValueError(f"label {xi} not tracked by this flow map")
        return int(hits[0])

    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.q, axis=1) > 0) and np.all(self.q_xi > 0))


def flow_map(velocity: Trajectory, labels, grid: PeriodicGrid, dt: float | None = None) -> FlowMap:
    """Integrate ``q' = u(t, q)``, ``q_xi' = u_x(t, q) q_xi`` from ``q(0) = xi``.

    With ``dt=None`` the step sequence is the velocity trajectory's own time
    stamps; otherwise uniform steps of at most ``dt``. Intermediate stage
    times are served by the trajectory's cubic interpolation. Loss of
    monotonicity in ``xi`` is logged in ``events`` and does not stop the
    integration.
    """
    labels = np.asarray(labels, dtype=float)
    if dt is None:
        stamps = velocity.times
    else:
        n = max(1, int(np.ceil((velocity.t1 - velocity.t0) / dt - 1e-9)))
        stamps = np.linspace(velocity.t0, velocity.t1, n + 1)

    def f(t, q, p):
        u, ux = trig_eval(grid, velocity(t), q, deriv=True)
        return u, ux * p

    q = labels.copy()
    p = np.ones_like(q)
    Q, P = [q], [p]
    events = []
    for t, t1 in zip(stamps[:-1], stamps[1:]):
        h = t1 - t
        a1, b1 = f(t, q, p)
        a2, b2 = f(t + h / 2, q + h / 2 * a1, p + h / 2 * b1)
        a3, b3 = f(t + h / 2, q + h / 2 * a2, p + h / 2 * b2)
        a4, b4 = f(t1, q + h * a3, p + h * b3)
        q = q + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        p = p + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        Q.append(q)
        P.append(p)
        if not events and (np.any(np.diff(q) <= 0) or np.any(p <= 0)):
            events.append({"t": float(t1), "kind": "monotonicity lost"})
    return FlowMap(np.asarray(stamps, dtype=float), labels, np.array(Q), np.array(P), events)


def _check_stamps(flow: FlowMap, m_traj: Trajectory):
    tol = 1e-12 * max(1.0, abs(m_traj.t1))
    idx = np.searchsorted(m_traj.times, flow.times - tol)
    idx = np.minimum(idx, len(m_traj) - 1)
    if np.any(np.abs(m_traj.times[idx] - flow.times) > tol):
        bad = flow.times[np.abs(m_traj.times[idx] - flow.times) > tol][0]
        raise ValueError(f"flow-map time {bad!r} is not a stamp of the momentum trajectory")
    return idx


def lagrangian_defects(flow: FlowMap, m_traj: Trajectory, m0: Field) -> np.ndarray:
    """``|m(t, q) q_xi^2 - m0(xi)| / (||m0||_inf + eps)`` per stamp and label."""
    grid = m0.grid
    idx = _check_stamps(flow, m_traj)
    ref = trig_eval(grid, m0.values, flow.labels)
    scale = float(np.max(np.abs(m0.values))) + DEFECT_FLOOR
    out = np.empty(flow.q.shape)
    for i, j in enumerate(idx):
        mq = trig_eval(grid, m_traj.values[j], flow.q[i])
        out[i] = np.abs(mq * flow.q_xi[i] ** 2 - ref) / scale
    return out


def lagrangian_invariant(flow: FlowMap, m_traj: Trajectory, m0: Field) -> np.ndarray:
    """Per-stamp ``max_xi |m(t, q) q_xi^2 - m0(xi)| / (||m0||_inf + eps)``."""
    return lagrangian_defects(flow, m_traj, m0).max(axis=1)


def odd_flow_defect(flow: FlowMap) -> float:
    """``max |q(t, -xi) + q(t, xi)|`` over labels whose mirror image is also a label."""
    lab = flow.labels
    pos = np.flatnonzero(lab > 0)
    mirror = np.searchsorted(lab, -lab[pos])
    ok = (mirror < lab.size) & (lab[np.minimum(mirror, lab.size - 1)] == -lab[pos])
    if not ok.any():
        raise ValueError("no mirror-symmetric label pairs")
    i, j = pos[ok], mirror[ok]
    return float(np.max(np.abs(flow.q[:, i] + flow.q[:, j])))


@dataclass
class SignAudit:
    times: np.ndarray
    q0: np.ndarray
    min_right: np.ndarray
    max_left: np.ndarray
    odd_defect: np.ndarray
    sup_m: np.ndarray
    mode: str
    tol: float

    @property
    def passed(self) -> bool:
        lim = self.tol * self.sup_m
        if self.mode == "positive":
            return bool(np.all(self.min_right >= -lim))
        return bool(
            np.all(self.min_right >= -lim)
            and np.all(self.max_left <= lim)
            and np.all(self.odd_defect <= lim)
        )

    def as_dict(self):
        return {
            "mode": self.mode,
            "passed": self.passed,
            "tol": self.tol,
            "worst_min_right": float(np.min(self.min_right / np.maximum(self.sup_m, DEFECT_FLOOR))),
            "worst_max_left": (None if self.mode == "positive" else
                               float(np.max(self.max_left / np.maximum(self.sup_m, DEFECT_FLOOR)))),
            "worst_odd_defect": float(np.max(self.odd_defect / np.maximum(self.sup_m, DEFECT_FLOOR))),
        }


def sign_audit(m_traj: Trajectory, flow: FlowMap, grid: PeriodicGrid, tol: float = 1e-8) -> SignAudit:
    """Check the sign pattern of ``m`` relative to the characteristic from 0.

    Non-negative initial data (``mode="positive"``): ``min m >= -tol ||m||``
    on the whole circle. Otherwise (``mode="odd"``): ``m >= 0`` on
    ``x >= q(t, 0)``, ``m <= 0`` on ``x <= q(t, 0)`` and ``m`` odd, each up to
    ``tol ||m||_inf``.
    """
    idx = _check_stamps(flow, m_traj)
    m_init = m_traj.values[0]
    positive = bool(np.all(m_init >= -tol * np.max(np.abs(m_init))))
    zero = flow.label_index(0.0)
    xc = grid.xc
    n = flow.times.size
    q0, lo, hi, odd, sup = (np.zeros(n) for _ in range(5))
    for i, j in enumerate(idx):
        m = m_traj.values[j]
        q0[i] = flow.q[i, zero]
        sup[i] = np.max(np.abs(m))
        if positive:
            lo[i] = m.min()
            hi[i] = -np.inf
        else:
            right = xc >= q0[i]
            left = xc <= q0[i]
            lo[i] = m[right].min() if right.any() else 0.0
            hi[i] = m[left].max() if left.any() else 0.0
        odd[i] = np.max(np.abs(m + grid.reflect(m)))
    return SignAudit(flow.times, q0, lo, hi, odd, sup, "positive" if positive else "odd", tol)
