import json

import numpy as np
import pytest

from fracch.audit import (audit_int, audit_l1, audit_ux_bound, amplification,
                          continuous_dependence_probe, probe_config,
                          translated_amplification)
from fracch.dynamics import SimConfig, simulate
from fracch.grid import Field, PeriodicGrid
from fracch.rng import random_field


@pytest.fixture(scope="module")
def g():
    return PeriodicGrid(512, 40.0)


def test_zero_run_audits(g):
    rep = simulate(Field(g, np.zeros(g.N)), SimConfig(T=0.5))
    v = audit_l1(rep)
    assert v.passed and v.measured == 0
    u = audit_ux_bound(rep)
    assert u.passed and u.measured == 0 and u.tolerance == 0


def test_positive_run_conserves_l1(g):
    rep = simulate(g(lambda x: 0.5 * np.exp(-(x / 1.5) ** 2)), SimConfig(a=1.5, T=2.0))
    v = audit_l1(rep)
    assert v.passed and not v.notes
    b = audit_ux_bound(rep)
    assert b.passed and b.extra["slack"] > 0
    json.dumps(v.as_dict()), json.dumps(b.as_dict())


def test_indefinite_data_falls_back_to_mean(g):
    rep = simulate(g(lambda x: np.exp(-x**2) - 0.8 * np.exp(-(x - 2) ** 2)),
                   SimConfig(a=1.5, T=2.0))
    v = audit_l1(rep)
    assert v.passed and v.notes and "int m" in v.notes[0]
    assert v.measured <= 1e-10
    assert v.extra["l1_drift"] > v.measured
    assert audit_int(rep).passed


def test_ux_bound_for_odd_data_at_order_two(g):
    rep = simulate(g(lambda x: 0.5 * (x / 1.5) * np.exp(-(x / 1.5) ** 2)),
                   SimConfig(a=2.0, T=2.0))
    assert audit_ux_bound(rep).passed


def test_ux_bound_needs_order_above_one(g):
    rep = simulate(g(lambda x: np.exp(-x**2)), SimConfig(a=1.0, T=0.2))
    with pytest.raises(ValueError, match="a > 1"):
        audit_ux_bound(rep)


def test_probe_with_zero_eps(g):
    out = continuous_dependence_probe(g(lambda x: np.exp(-x**2)), 0.0, SimConfig(T=0.5))
    assert out["passed"] and out["A_weak"] == 0


def test_probe_two_scale(g):
    out = continuous_dependence_probe(g(lambda x: np.exp(-x**2)), 1e-4,
                                      SimConfig(a=1.5, T=1.0), trials=2, seed=1)
    assert out["passed"]
    assert all(1 / 3 <= r <= 3 for r in out["ratios"])
    json.dumps(out)


def test_probe_translation_invariance(g):
    u0 = g(lambda x: np.exp(-x**2))
    a0, a1 = translated_amplification(u0, random_field(g, 7), 1e-4,
                                      SimConfig(a=1.5, T=1.0), shift=37)
    assert abs(a0 - a1) <= 1e-8 * a0


def test_aligned_perturbation(g):
    u0 = g(lambda x: np.exp(-x**2))
    cfg = probe_config(u0, SimConfig(a=1.5, T=1.0))
    A1 = amplification(u0, u0, 1e-4, cfg)[0]
    A2 = amplification(u0, u0, 1e-5, cfg)[0]
    assert np.isfinite(A1) and 1 / 3 <= A1 / A2 <= 3


def test_probe_parity_class(g):
    out = continuous_dependence_probe(g(lambda x: x * np.exp(-x**2)), 1e-4,
                                      SimConfig(a=1.5, T=0.3), trials=1)
    assert any("odd" in n for n in out["notes"])


def test_probe_aborts_on_blowup():
    g = PeriodicGrid(1024, 40.0)
    with pytest.raises(RuntimeError, match="blow-up"):
        continuous_dependence_probe(g(lambda x: -4 * x * np.exp(-x**2)), 1e-4,
                                    SimConfig(a=1.0, T=2.0, strip_min=2.0), trials=1)
