"""Physical-space kernel of ``(1 - d_xx)^(-a)`` via heat-semigroup subordination.

The Gamma identity

    (1 + k^2)^(-a) = 1/Gamma(a) * int_0^inf s^(a-1) e^(-s) e^(-s k^2) ds

turns the inverse Helmholtz operator into convolution with

    G_a(x) = 1/Gamma(a) * int_0^inf s^(a-1) e^(-s) H(s, x) ds,

where ``H`` is the heat kernel periodized over the torus. Nothing in this
module touches the Fourier symbol ``(1 + k^2)^(-a)``; it serves as the
independent check on :func:`fracch.grid.helmholtz_invert`.

The ``s`` integral is done in the variable ``tau = log s`` with the trapezoid
rule (the integrand is analytic and decays double-exponentially on the right),
or with generalized Gauss-Laguerre nodes for weight ``s^(a-1) e^(-s)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import roots_genlaguerre

from .grid import Field, PeriodicGrid

_EPS = 1e-17


class QuadratureError(RuntimeError):
    """Successive quadrature refinements disagree."""

    def __init__(self, coarse, fine, tol):
        self.coarse = np.asarray(coarse)
        self.fine = np.asarray(fine)
        self.tol = tol
        diff = float(np.max(np.abs(self.fine - self.coarse)))
        super().__init__(
            f"subordination quadrature not converged: refinements differ by {diff:.3e} "
            f"(tol {tol:.1e}); coarse={self.coarse!r}, fine={self.fine!r}"
        )


@dataclass(frozen=True)
class QuadSpec:
    """How to evaluate the ``s`` integral.

    ``method="log-trapezoid"`` uses step ``step`` in ``log s`` and truncates at
    ``s_max``; ``method="laguerre"`` uses ``nodes`` generalized Gauss-Laguerre
    points. Either way the estimate is compared against a half-resolution
    estimate and rejected when they differ by more than ``tol`` (relative to
    the largest value).
    """

    method: str = "log-trapezoid"
    step: float = 0.05
    s_max: float = 60.0
    nodes: int = 200
    tol: float = 1e-9

    def __post_init__(self):
        if self.method not in ("log-trapezoid", "laguerre"):
            raise ValueError(f"unknown quadrature method {self.method!r}")


def _check_a(a):
    if not a > 0:
        raise ValueError(f"kernel order a must be positive, got {a}")


def _tau_lower(a, zmin):
    bounds = []
    if a > 0.5:
        bounds.append(math.log(_EPS) / (a - 0.5))
    if zmin > 0:
        # exp(-z^2 / 4s) < 1e-17 below this s
        bounds.append(math.log(zmin**2 / (4 * 40.0)))
    if not bounds:
        raise ValueError(f"G_a(0) diverges for a={a} <= 1/2")
    return max(bounds) - 1.0


def _images(z, s, L, deriv):
    """Periodized heat kernel (or its x-derivative): rows z, columns s."""
    out = np.zeros((z.size, s.size))
    nimg = int(math.ceil(math.sqrt(4 * s.max() * 40.0) / L)) + 1
    for n in range(-nimg, nimg + 1):
        if n:
            # skip the s range where this image is below exp(-40)
            dmin = (abs(n) - 0.5) * L
            sel = s > dmin**2 / 160.0
            if not sel.any():
                continue
        else:
            sel = slice(None)
        d = z[:, None] + n * L
        ss = s[sel]
        h = np.exp(-(d**2) / (4 * ss)) / np.sqrt(4 * np.pi * ss)
        if deriv:
            h = h * (-d / (2 * ss))
        out[:, sel] += h
    return out


def _log_trapezoid(a, z, L, step, s_max, deriv):
    zpos = z[z > 0]
    if deriv and not zpos.size:
        return np.zeros_like(z), np.zeros_like(z)
    # z = 0 entries need the full s^(a - 1/2) tail, not the Gaussian cut-off
    zmin = float(zpos.min()) if zpos.size == z.size or deriv else 0.0
    # the derivative vanishes at z = 0, only the Gaussian cut-off matters
    lo = _tau_lower(0.5 if deriv else a, zmin)
    hi = math.log(s_max)
    n = int(math.ceil((hi - lo) / step))
    tau = hi - step * np.arange(n + 1)[::-1]
    s = np.exp(tau)
    w = step * s**a * np.exp(-s) / math.gamma(a)
    w[0] *= 0.5
    w[-1] *= 0.5
    H = _images(z, s, L, deriv)
    fine = H @ w
    # every other node: the step-2h trapezoid estimate for free
    wc = 2 * step * s[::2] ** a * np.exp(-s[::2]) / math.gamma(a)
    wc[0] *= 0.5
    if n % 2 == 0:
        wc[-1] *= 0.5
    coarse = H[:, ::2] @ wc
    return fine, coarse


def _laguerre(a, z, L, nodes, deriv):
    def est(n):
        s, w = roots_genlaguerre(n, a - 1.0)
        return _images(z, s, L, deriv) @ (w / math.gamma(a))

    return est(2 * nodes), est(nodes)


def _evaluate(a, x, L, quad, deriv):
    _check_a(a)
    quad = quad or QuadSpec()
    z = np.abs(np.atleast_1d(np.asarray(x, dtype=float)))
    # fold onto [0, L/2]; the periodized kernel is even and L-periodic
    z = np.mod(z, L)
    z = np.minimum(z, L - z)
    if quad.method == "log-trapezoid":
        fine, coarse = _log_trapezoid(a, z, L, quad.step, quad.s_max, deriv)
    else:
        fine, coarse = _laguerre(a, z, L, quad.nodes, deriv)
    scale = max(float(np.max(np.abs(fine))), 1e-300)
    if np.max(np.abs(fine - coarse)) > quad.tol * scale:
        raise QuadratureError(coarse, fine, quad.tol)
    return fine


def green_kernel(a: float, x, quadrature: QuadSpec | None = None, L: float = 40.0):
    """Evaluate ``G_a(x)`` on the torus of length ``L``.

    Returns a float for scalar ``x`` and an array otherwise. ``G_a(x)`` and
    ``G_a(-x)`` are computed from the same folded argument, so evenness is
    exact.
    """
    g = _evaluate(a, x, L, quadrature, deriv=False)
    return float(g[0]) if np.ndim(x) == 0 else g.reshape(np.shape(x))


def green_kernel_dx(a: float, x, quadrature: QuadSpec | None = None, L: float = 40.0):
    """``d/dx G_a(x)`` (odd in ``x``)."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    folded = np.mod(xs, L)
    sign = np.where(folded < L / 2, 1.0, -1.0)
    sign[(folded == 0) | (folded == L / 2)] = 0.0
    g = sign * _evaluate(a, xs, L, quadrature, deriv=True)
    return float(g[0]) if np.ndim(x) == 0 else g.reshape(np.shape(x))


def kernel_field(grid: PeriodicGrid, a: float, quadrature: QuadSpec | None = None) -> Field:
    """Samples of ``G_a`` on the grid, exactly even under ``j -> N - j``."""
    j = np.arange(grid.N)
    r = np.minimum(j, grid.N - j) * grid.dx
    return Field(grid, green_kernel(a, r, quadrature, grid.L))


def _half_period_nodes(L, width=0.05, order=16, hmin=1e-14, ratio=0.2):
    """Gauss-Legendre nodes on [0, L/2], graded geometrically towards 0."""
    gx, gw = np.polynomial.legendre.leggauss(order)
    edges = [0.0]
    e = width
    while e > hmin:
        edges.append(e)
        e *= ratio
    edges = sorted(edges) + list(np.arange(2 * width, L / 2, width)) + [L / 2]
    edges = np.unique(edges)
    lo, hi = edges[:-1], edges[1:]
    z = ((hi - lo)[:, None] * (gx + 1) / 2 + lo[:, None]).ravel()
    w = ((hi - lo)[:, None] * gw / 2).ravel()
    return z, w


def kernel_coefficients(grid: PeriodicGrid, a: float, quadrature: QuadSpec | None = None):
    """``int_torus G_a(z) exp(-i k z) dz`` at every grid wavenumber.

    Computed by Gauss-Legendre quadrature in ``z`` on a mesh graded towards
    the kernel's cusp at the origin.
    """
    z, w = _half_period_nodes(grid.L)
    g = green_kernel(a, z, quadrature, grid.L)
    return 2 * np.cos(np.outer(np.abs(grid.k), z)) @ (w * g)


def kernel_convolve(f: Field, a: float, quadrature: QuadSpec | None = None) -> Field:
    """``G_a * f`` for the trigonometric interpolant of ``f``, sampled on the grid."""
    ghat = kernel_coefficients(f.grid, a, quadrature)
    return Field.from_spectrum(f.grid, f.spectrum * ghat)


@dataclass(frozen=True)
class KernelSup:
    value: float
    argmax: float
    refined: float
    rel_change: float


def _sup_dx(a, L, quad, npts):
    x = np.linspace(0, L / 2, npts + 1)[1:]
    g = np.abs(green_kernel_dx(a, x, quad, L))
    i = int(np.argmax(g))
    lo, hi = x[max(i - 1, 0)] if i else x[0] * 1e-3, x[min(i + 1, npts - 1)]
    res = minimize_scalar(
        lambda t: -abs(green_kernel_dx(a, t, quad, L)),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-10},
    )
    best = max(-res.fun, g[i])
    return best, (res.x if -res.fun >= g[i] else x[i])


def kernel_derivative_sup(a: float, L: float = 40.0, quadrature: QuadSpec | None = None,
                          npts: int = 2000, details: bool = False):
    """``sup_x |G_a'(x)|``, the constant in ``|u_x| <= C ||m||_1``.

    Only defined for ``a > 1``. The search is repeated with half the
    quadrature step and twice the scan resolution; ``details=True`` returns
    a :class:`KernelSup` carrying both values.
    """
    if not a > 1:
        raise ValueError(f"kernel_derivative_sup needs a > 1, got {a}")
    quad = quadrature or QuadSpec()
    v1, x1 = _sup_dx(a, L, quad, npts)
    fine = QuadSpec(quad.method, quad.step / 2, quad.s_max, 2 * quad.nodes, quad.tol)
    v2, _ = _sup_dx(a, L, fine, 2 * npts)
    out = KernelSup(v2, x1, v1, abs(v2 - v1) / v2)
    return out if details else out.value
