import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracch.grid import (Field, Multiplier, PeriodicGrid, SpectralOps, derivative,
                         forward_transform, helmholtz_apply, helmholtz_invert,
                         helmholtz_symbol, inverse_transform)
from fracch.rng import random_field


@pytest.mark.parametrize("N", [7, 12, 4, 0])
def test_grid_rejects_bad_N(N):
    with pytest.raises(ValueError, match="power of two"):
        PeriodicGrid(N, 1.0)


def test_grid_rejects_bad_length():
    with pytest.raises(ValueError, match="L must be positive"):
        PeriodicGrid(16, 0.0)


def test_grid_points(grid):
    assert np.all(np.diff(grid.x) > 0)
    assert np.allclose(np.diff(grid.x), grid.dx)
    assert grid.xc[0] == 0 and grid.xc.min() == -grid.L / 2
    assert grid.k[1] == pytest.approx(2 * np.pi / grid.L)


def test_transform_of_constant(grid):
    c = forward_transform(Field(grid, np.ones(grid.N)))
    assert c[0] == pytest.approx(1.0)
    assert np.max(np.abs(c[1:])) < 1e-15


def test_transform_of_cosine(grid):
    c = forward_transform(Field(grid, np.cos(2 * np.pi * grid.x / grid.L)))
    assert c[1] == pytest.approx(0.5) and c[-1] == pytest.approx(0.5)
    c[1] = c[-1] = 0
    assert np.max(np.abs(c)) < 1e-15


@given(st.integers(0, 2**32))
def test_hermitian_symmetry_and_round_trip(seed):
    g = PeriodicGrid(64, 10.0)
    f = Field(g, np.random.default_rng(seed).normal(size=g.N))
    c = forward_transform(f)
    assert np.array_equal(c[1:][::-1], np.conj(c[1:]))
    back = inverse_transform(g, c).values
    assert np.linalg.norm(back - f.values) <= 1e-12 * np.linalg.norm(f.values)


def test_parseval_on_random_fields(grid):
    rng = np.random.default_rng(1)
    for _ in range(100):
        f = Field(grid, rng.normal(size=grid.N))
        lhs = f.l2() ** 2
        rhs = grid.L * np.sum(np.abs(f.spectrum) ** 2)
        assert abs(lhs - rhs) <= 1e-12 * lhs


def test_non_finite_sample_named(grid):
    v = np.zeros(grid.N)
    v[17] = np.nan
    with pytest.raises(ValueError, match="index 17"):
        Field(grid, v)


def test_field_is_read_only(grid):
    f = Field(grid, np.zeros(grid.N))
    with pytest.raises(ValueError):
        f.values[0] = 1.0


def test_field_grid_mismatch(grid):
    with pytest.raises(ValueError, match="grid"):
        Field(grid, np.zeros(grid.N)) + Field(PeriodicGrid(512, 20.0), np.zeros(512))


def test_derivative_of_sine(grid):
    k = grid.k[5]
    f = derivative(Field(grid, np.sin(k * grid.x)))
    assert np.max(np.abs(f.values - k * np.cos(k * grid.x))) <= 1e-10 * k


def test_derivative_of_constant(grid):
    assert np.max(np.abs(derivative(Field(grid, np.full(grid.N, 3.0))).values)) < 1e-14


def test_second_derivative_against_finite_differences():
    for N in (256, 512):
        g = PeriodicGrid(N, 40.0)
        f = np.exp(-(g.x - g.L / 2) ** 2)
        h = g.dx
        fd = (np.roll(f, -1) - 2 * f + np.roll(f, 1)) / h**2
        err = np.max(np.abs(derivative(Field(g, f), 2).values - fd))
        # leading FD error is h^2 f''''/12 with max |f''''| = 12
        assert err <= 1.05 * h**2


def test_odd_derivative_drops_nyquist(grid):
    f = Field(grid, np.cos(np.pi * np.arange(grid.N)))
    assert np.max(np.abs(derivative(f, 1).values)) == 0
    assert np.max(np.abs(derivative(f, 2).values)) > 0


def test_derivative_order_checked(grid):
    with pytest.raises(ValueError):
        derivative(Field(grid, np.zeros(grid.N)), 0)


def test_helmholtz_examples(grid2pi):
    g = grid2pi
    assert np.allclose(helmholtz_invert(Field(g, np.cos(g.x)), 1).values, np.cos(g.x) / 2,
                       rtol=0, atol=1e-15)
    out = helmholtz_invert(Field(g, np.cos(2 * g.x)), 0.5).values
    assert np.allclose(out, 0.4472135955 * np.cos(2 * g.x), atol=1e-10)
    for a in (0.3, 1.0, 2.7):
        assert np.allclose(helmholtz_invert(Field(g, np.full(g.N, 2.5)), a).values, 2.5)


@pytest.mark.parametrize("a", [0.5, 0.75, 1, 1.5, 2, 2.5])
def test_helmholtz_round_trip(grid, a):
    for seed in range(5):
        f = random_field(grid, seed)
        back = helmholtz_invert(helmholtz_apply(f, a), a)
        assert np.linalg.norm(back.values - f.values) <= 1e-11 * np.linalg.norm(f.values)


def test_multiplier_even_and_finite(grid):
    sym = helmholtz_symbol(-1.5).on(grid)
    assert np.all(np.isfinite(sym))
    assert np.array_equal(sym, grid.reflect(sym))


def test_spectral_ops_matches_field_api(grid):
    f = random_field(grid, 3)
    ops = SpectralOps(grid, 1.5)
    assert np.allclose(ops.u_of_m(f.values), helmholtz_invert(f, 1.5).values, atol=1e-15)
    assert np.allclose(ops.dx(f.values), derivative(f).values, atol=1e-13)
