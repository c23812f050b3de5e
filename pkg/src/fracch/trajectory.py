"""Time-sampled grid functions with cubic interpolation in time."""
from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline


class Trajectory:
    """Stack of samples ``values[i]`` at strictly increasing ``times[i]``.

    With ``derivs`` (the time derivatives at the stamps) evaluation is cubic
    Hermite, which matches the fourth-order steppers; otherwise a not-a-knot
    cubic spline. Calling the object outside ``[times[0], times[-1]]`` raises.
    """

    def __init__(self, times, values, derivs=None):
        self.times = np.asarray(times, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.derivs = None if derivs is None else np.asarray(derivs, dtype=float)
        if self.times.ndim != 1 or self.values.shape[0] != self.times.size:
            raise ValueError("times and values disagree in length")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        self._interp = None

    def __len__(self):
        return self.times.size

    @property
    def t0(self):
        return self.times[0]

    @property
    def t1(self):
        return self.times[-1]

    def _build(self):
        if self.times.size == 1:
            v = self.values[0]
            self._interp = lambda t: v
        elif self.derivs is not None:
            self._interp = CubicHermiteSpline(self.times, self.values, self.derivs, axis=0)
        elif self.times.size >= 4:
            self._interp = CubicSpline(self.times, self.values, axis=0)
        else:
            self._interp = CubicSpline(self.times, self.values, axis=0, bc_type="natural")

    def __call__(self, t: float) -> np.ndarray:
        slack = 1e-12 * max(1.0, abs(self.t1))
        if t < self.t0 - slack or t > self.t1 + slack:
            raise ValueError(
                f"time {t!r} outside the sampled range [{self.t0!r}, {self.t1!r}]"
            )
        if self._interp is None:
            self._build()
        i = np.searchsorted(self.times, t)
        if i < self.times.size and self.times[i] == t:
            return self.values[i]
        return np.asarray(self._interp(min(max(t, self.t0), self.t1)))

    @classmethod
    def constant(cls, values, t0=0.0, t1=1.0):
        v = np.asarray(values, dtype=float)
        return cls([t0, t1], [v, v], [np.zeros_like(v), np.zeros_like(v)])
