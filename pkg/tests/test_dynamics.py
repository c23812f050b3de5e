import numpy as np
import pytest

from fracch.dynamics import (BlowUp, NonFiniteError, SimConfig, StepState, cfl_dt,
                             detect_blowup, rhs, rk4_step, simulate)
from fracch.grid import Field, PeriodicGrid, helmholtz_apply
from fracch.rng import random_field


def richardson_order(m0, a=1.5, T=2.0, dt=0.1):
    finals = [simulate(m0, SimConfig(a=a, T=T, dt=h, diagnostics_every=T)).final.m.values
              for h in (dt, dt / 2, dt / 4)]
    e1 = np.max(np.abs(finals[0] - finals[1]))
    e2 = np.max(np.abs(finals[1] - finals[2]))
    return np.log2(e1 / e2)


def test_constants_are_equilibria(grid):
    m = Field(grid, np.full(grid.N, 0.7))
    assert np.max(np.abs(rhs(m, 1.5).values)) == 0
    s = rk4_step(StepState(0.0, m), 0.1, SimConfig())
    assert np.array_equal(s.m.values, m.values) and s.t == 0.1


def test_zero_state_stays_zero(grid):
    s = rk4_step(StepState(0.0, Field(grid, np.zeros(grid.N))), 0.3, SimConfig())
    assert not np.any(s.m.values)


def test_rhs_of_odd_field_is_odd(grid):
    m = random_field(grid, 5, parity="odd")
    r = rhs(m, 1.5).values
    assert np.max(np.abs(r + grid.reflect(r))) <= 1e-14 * np.max(np.abs(r))


@pytest.mark.parametrize("a", [1.0, 1.5, 2.0])
def test_rhs_has_zero_mean(grid, a):
    for seed in range(5):
        m = random_field(grid, seed, kmax=100, decay=20)
        assert abs(rhs(m, a).integral()) <= 1e-12 * m.l2() * grid.L


def test_non_finite_term_is_named(grid):
    v = np.zeros(grid.N)
    v[3] = 1e300
    m = Field(grid, v)
    with pytest.raises(NonFiniteError, match="term"):
        rhs(m, 0.0, dealias=False)


def test_non_finite_stage_surfaces_as_blowup(grid):
    v = np.zeros(grid.N)
    v[3] = 1e300
    with pytest.raises(BlowUp) as info:
        rk4_step(StepState(0.0, Field(grid, v)), 0.1, SimConfig(a=0.0))
    assert "non-finite" in info.value.event.reason


def test_step_size_positive():
    with pytest.raises(ValueError):
        rk4_step(StepState(0.0, Field(PeriodicGrid(16), np.zeros(16))), 0.0, SimConfig())


def test_richardson_order_is_four(grid):
    order = richardson_order(grid(lambda x: np.exp(-x**2)))
    assert 3.7 <= order <= 4.3


def test_cfl_step(grid):
    cfg = SimConfig(a=1.0, T=5.0)
    zero = StepState(0.0, Field(grid, np.zeros(grid.N)))
    assert 0 < cfl_dt(zero, cfg) <= cfg.T
    m = helmholtz_apply(grid(lambda x: np.exp(-x**2)), 1.0)
    dt1 = cfl_dt(StepState(0.0, m), cfg)
    dt2 = cfl_dt(StepState(0.0, m * 2.0), cfg)
    assert dt2 == pytest.approx(dt1 / 2, rel=1e-12)
    assert cfl_dt(StepState(4.99, m), cfg) == pytest.approx(0.01)
    assert cfl_dt(StepState(0.0, m), cfg, next_output=1e-4) == pytest.approx(1e-4)


def test_detect_blowup(grid):
    assert detect_blowup(StepState(0.0, Field(grid, np.zeros(grid.N))), 1.0, 1.5) is None
    k = grid.k[3]
    u = Field(grid, np.sin(k * grid.x))
    ev = detect_blowup(StepState(0.5, helmholtz_apply(u, 1.5)), k / 2, 1.5)
    assert ev is not None and ev.t == 0.5
    assert ev.value == pytest.approx(k, rel=1e-12)


def test_config_validation():
    for kw in ({"T": 0}, {"courant": 0}, {"courant": 1.5}, {"blowup_threshold": 0},
               {"dt": -1}, {"strip_min": -1}):
        with pytest.raises(ValueError):
            SimConfig(**kw)


def test_zero_run_has_zero_diagnostics(grid):
    rep = simulate(Field(grid, np.zeros(grid.N)), SimConfig(T=1.0))
    for r in rep.rows:
        assert all(v == 0 for k, v in r.as_dict().items() if k not in ("t", "besov_s_p_r"))
    assert not rep.blew_up


def test_outputs_land_on_schedule(grid):
    rep = simulate(grid(lambda x: np.exp(-x**2)),
                   SimConfig(T=1.0, diagnostics_every=0.25, snapshot_every=0.5))
    assert np.allclose(rep.column("t"), [0, 0.25, 0.5, 0.75, 1.0], atol=1e-12)
    assert [s.t for s in rep.snapshots] == pytest.approx([0.0, 0.5, 1.0])
    assert np.all(np.diff(rep.column("t")) > 0)


def test_run_is_deterministic(grid):
    m0 = random_field(grid, 8)
    a = simulate(m0, SimConfig(T=0.5))
    b = simulate(m0, SimConfig(T=0.5))
    assert a.steps == b.steps
    assert np.array_equal(a.final.m.values, b.final.m.values)


def test_odd_data_stays_odd(grid):
    rep = simulate(grid(lambda x: x * np.exp(-x**2)), SimConfig(T=2.0))
    assert max(r.odd_defect / r.sup_m for r in rep.rows) <= 1e-8


def test_mean_and_energy_conserved(grid):
    rep = simulate(grid(lambda x: np.exp(-x**2) + 0.3 * x * np.exp(-(x - 1) ** 2)),
                   SimConfig(T=2.0))
    im = rep.column("int_m")
    e = rep.column("energy_um")
    assert np.max(np.abs(im - im[0])) <= 1e-10 * rep.rows[0].l1_m
    assert np.max(np.abs(e - e[0])) <= 1e-6 * e[0]


def test_trajectory_recorded_on_steps(grid):
    rep = simulate(grid(lambda x: np.exp(-x**2)), SimConfig(T=0.5, record_trajectory=True))
    tr = rep.trajectory
    assert len(tr) == rep.steps + 1 and tr.t1 == pytest.approx(0.5)
    assert np.array_equal(tr(0.5), rep.final.m.values)


def test_strip_collapse_event():
    g = PeriodicGrid(1024, 40.0)
    m0 = g(lambda x: -4 * x * np.exp(-x**2))
    rep = simulate(m0, SimConfig(a=1.0, T=4.0, strip_min=2.0))
    assert rep.blew_up and rep.events[0].reason == "analyticity strip collapse"
    assert 0.5 < rep.events[0].t < 2.0
    assert rep.events[0].x == pytest.approx(0.0, abs=g.dx)
