import math

import numpy as np
import pytest

from zenodecay.errors import DomainError
from zenodecay.scenarios import (AntiZenoPlan, CavityGeometry, Fig3Plan, Fig4Plan, PulseSchedule,
                                 cavity_params, preset, validate_schedule)


def test_cavity_mapping_formulas(cavity_weak):
    p = cavity_params(cavity_weak)
    c = 3e10
    assert p.gamma_s == pytest.approx(c / (15.0 * math.sqrt(1e5)))
    assert p.g_s == pytest.approx(math.sqrt(c * 0.02 * 1e6 / 30.0))
    assert p.gamma_b == pytest.approx(0.98e6)


def test_cavity_response_is_composite(cavity_strong):
    r = cavity_strong.response()
    assert r.gamma_b == pytest.approx(0.98e6)
    assert r.sharp.gamma_s == pytest.approx(2e6)


@pytest.mark.parametrize("args", [(1.0, 15, 0.02, 1e6), (1e5, 0, 0.02, 1e6), (1e5, 15, 1.0, 1e6),
                                  (1e5, 15, 0.0, 1e6), (1e5, 15, 0.02, 0.0)])
def test_cavity_validation(args):
    with pytest.raises(DomainError):
        CavityGeometry(*args)


def test_schedule_feasible():
    rep = validate_schedule(PulseSchedule(tau=1e-6, t_p=1e-8, omega_p=math.pi / 1e-8, gamma_u=1e7))
    assert rep.ok
    assert set(rep.checks) == {"interval_vs_pulse", "pi_pulse", "pulse_vs_aux_lifetime",
                               "interval_vs_aux_lifetime"}


@pytest.mark.parametrize("kw,bad", [
    # the two lifetime conditions already imply tau >= 100 t_p
    (dict(tau=5e-8, t_p=1e-8, omega_p=math.pi / 1e-8, gamma_u=1e7),
     ["interval_vs_pulse", "interval_vs_aux_lifetime"]),
    (dict(tau=1e-6, t_p=1e-8, omega_p=1.2 * math.pi / 1e-8, gamma_u=1e7), ["pi_pulse"]),
    (dict(tau=1e-6, t_p=1e-8, omega_p=math.pi / 1e-8, gamma_u=1e8), ["pulse_vs_aux_lifetime"]),
    (dict(tau=1e-6, t_p=1e-8, omega_p=math.pi / 1e-8, gamma_u=5e6), ["interval_vs_aux_lifetime"]),
])
def test_schedule_violations(kw, bad):
    rep = validate_schedule(PulseSchedule(**kw))
    assert not rep.ok
    assert [k for k, v in rep.checks.items() if not v[0]] == bad


def test_schedule_nonpositive():
    assert not validate_schedule(PulseSchedule(0.0, 1.0, 1.0, 1.0)).ok


def test_preset_lookup():
    assert isinstance(preset("fig3"), Fig3Plan)
    assert isinstance(preset("fig4"), Fig4Plan)
    assert isinstance(preset("antizeno"), AntiZenoPlan)
    with pytest.raises(DomainError):
        preset("fig9")


def test_fig3_curve_set():
    res = Fig3Plan().run()
    assert len(res.series) == 4
    assert res.rows.shape[1] == len(res.columns) == 5
    assert np.all(res.rows[:, 0] >= 0) and res.rows[-1, 0] == pytest.approx(4e-6)
    # reference coupling quoted at two significant digits
    assert res.checks["g_s"] == pytest.approx(4.5e6, rel=0.01)


def test_fig4_curve_set():
    plan = Fig4Plan()
    res = plan.run()
    assert len(res.series) == 4
    labels = [s[0] for s in res.series]
    assert any("5pi" in lab for lab in labels) and any("3pi" in lab for lab in labels)
    assert len(res.checks["enhancement"]) == 2


def test_antizeno_small_grid():
    plan = AntiZenoPlan(omega_a_values=(1e15,), nu_points=8)
    res = plan.run()
    assert res.rows.shape == (8, 6)
    assert all(res.checks["strictly_increasing"].values())
    assert res.checks["closed_vs_quadrature_max_rel"] < 1e-8
    assert len(plan.series_by_omega_a(res)) == 1
