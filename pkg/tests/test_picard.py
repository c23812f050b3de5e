import numpy as np
import pytest

from fracch.dynamics import rhs
from fracch.grid import Field, PeriodicGrid, derivative, helmholtz_apply
from fracch.littlewood_paley import build_partition, low_freq_truncate
from fracch.picard import (PicardConfig, PicardDivergence, commutator, commutator_bony,
                           iterate, linear_transport_solve, source_term)
from fracch.rng import random_field
from fracch.trajectory import Trajectory


def identity_defect(u, a):
    m = helmholtz_apply(u, a)
    lhs = helmholtz_apply(source_term(u, a) - u * derivative(u), a).values
    ref = rhs(m, a, dealias=False).values
    return np.max(np.abs(lhs - ref)) / np.max(np.abs(ref))


def test_source_of_constant_vanishes(grid):
    assert np.max(np.abs(source_term(Field(grid, np.full(grid.N, 1.3)), 1.5).values)) < 1e-15


@pytest.mark.parametrize("a", [0.75, 1.0, 1.5, 2.0])
def test_source_identity(grid, a):
    for seed in range(10):
        u = random_field(grid, seed, kmax=60, decay=12)
        assert identity_defect(u, a) <= 1e-9


def test_source_of_odd_field_is_odd(grid):
    F = source_term(random_field(grid, 3, parity="odd"), 1.5).values
    assert np.max(np.abs(F + grid.reflect(F))) <= 1e-14 * np.max(np.abs(F))


def test_source_rejects_non_finite(grid):
    v = np.zeros(grid.N)
    v[9] = 1e300
    with np.errstate(all="ignore"), pytest.raises(FloatingPointError, match="non-finite"):
        source_term(Field(grid, v), 0.0)


def test_bony_split_matches_commutator(grid):
    for seed in range(10):
        u = random_field(grid, seed, kmax=80, decay=16)
        c1 = commutator(u, 1.5).values
        c2 = commutator_bony(u, 1.5).values
        assert np.max(np.abs(c1 - c2)) <= 1e-9 * np.max(np.abs(c1))


def test_transport_with_nothing_moving(grid):
    init = random_field(grid, 1)
    tr = linear_transport_solve(np.zeros(grid.N), np.zeros(grid.N), init, 0.1, 1.0)
    assert all(np.array_equal(v, init.values) for v in tr.values)


def test_transport_by_constant_speed(grid2pi):
    g = grid2pi
    tr = linear_transport_solve(np.full(g.N, 0.8), np.zeros(g.N), Field(g, np.cos(g.x)),
                                0.01, 1.0)
    assert np.max(np.abs(tr.values[-1] - np.cos(g.x - 0.8))) <= 1e-8


def test_manufactured_transport(grid2pi):
    g = grid2pi
    x = g.x
    A = lambda t: np.sin(x) * (1 + t)  # noqa: E731
    # u = e^{-t} cos x solves u_t + A u_x = S with
    S = lambda t: -np.exp(-t) * np.cos(x) - A(t) * np.exp(-t) * np.sin(x)  # noqa: E731
    tr = linear_transport_solve(A, S, Field(g, np.cos(x)), 0.01, 1.0)
    assert np.max(np.abs(tr.values[-1] - np.exp(-1) * np.cos(x))) <= 1e-7


def test_transport_rejects_short_coefficients(grid):
    short = Trajectory.constant(np.zeros(grid.N), 0.0, 0.5)
    with pytest.raises(ValueError, match="need"):
        linear_transport_solve(short, np.zeros(grid.N), Field(grid, np.zeros(grid.N)), 0.1, 1.0)


def test_zero_data_gives_zero_iterates(grid):
    res = iterate(Field(grid, np.zeros(grid.N)), PicardConfig(T=0.5))
    assert res.converged
    assert all(not np.any(r.trajectory.values) for r in res.records)


def test_initial_data_truncation_policy(grid):
    u0 = grid(lambda x: 0.1 * np.exp(-x**2))
    res = iterate(u0, PicardConfig(T=0.2, n_max=3, tol=0))
    for rec in res.records[1:]:
        ref = low_freq_truncate(u0, min(rec.n, build_partition(grid).jmax)).values
        assert np.array_equal(rec.trajectory.values[0], ref)


def test_small_data_contracts(grid):
    res = iterate(grid(lambda x: 0.1 * np.exp(-x**2)), PicardConfig(T=1.0))
    assert res.converged and res.geometric
    assert res.tail_ratios().max() <= 0.7


def test_divergence_reports_ratios():
    g = PeriodicGrid(256, 40.0)
    with pytest.raises(PicardDivergence) as info:
        iterate(g(lambda x: np.exp(-x**2)), PicardConfig(T=3.0, n_max=12, dt=0.01))
    assert len(info.value.ratios) >= 3 and info.value.ratios[-1] > 1


def test_config_validation():
    with pytest.raises(ValueError):
        PicardConfig(n_max=1)
    with pytest.raises(ValueError):
        PicardConfig(T=0)
