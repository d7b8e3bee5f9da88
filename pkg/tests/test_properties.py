import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zenodecay.config import build_config, RunConfig
from zenodecay.decay import (hydrogenic_lorentzian_rate, lorentzian_interrupted_rate,
                             universal_rate)
from zenodecay.errors import ValidityWarning
from zenodecay.evolution import MeasurementSchedule, interrupted_evolution
from zenodecay.filters import LorentzianFilter, SincSquaredFilter
from zenodecay.quadrature import integrate_panels
from zenodecay.reservoirs import CompositeResponse, HydrogenicResponse, LorentzianMode

pos = st.floats(min_value=1e-3, max_value=1e3)
logf = lambda lo, hi: st.floats(min_value=lo, max_value=hi).map(lambda x: 10.0 ** x)


@given(g=pos, gam=pos, ws=logf(1, 6), w=st.floats(min_value=0, max_value=1e7))
def test_lorentzian_response_nonnegative(g, gam, ws, w):
    assert LorentzianMode(g, gam, ws)(w) >= 0


@given(alpha=st.floats(min_value=0, max_value=10), wc=logf(10, 20), x=st.floats(0, 1e4))
def test_hydrogenic_response_nonnegative(alpha, wc, x):
    assert HydrogenicResponse(alpha, wc)(x * wc) >= 0


@given(nu=logf(-3, 3), d=st.floats(-1e4, 1e4))
def test_filters_nonnegative(nu, d):
    assert LorentzianFilter(nu)(d) >= 0
    assert SincSquaredFilter(nu)(d) >= 0


@given(nu=logf(-6, 6))
@settings(max_examples=30)
def test_lorentzian_filter_normalized(nu):
    half, _ = integrate_panels(LorentzianFilter(nu), [0.0, nu, 100 * nu], tail=True, epsrel=1e-12)
    assert 2 * half == pytest.approx(1.0, rel=1e-9)


@given(lam=logf(-3, 3), wa=logf(13, 18), nu=logf(10, 17))
@settings(max_examples=50)
def test_hydrogenic_scaling_covariance(lam, wa, nu):
    # every frequency scaled by lam scales the rate by lam
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        base = hydrogenic_lorentzian_rate(1.0, 1e19, wa, nu)
        scaled = hydrogenic_lorentzian_rate(1.0, lam * 1e19, lam * wa, lam * nu)
    assert scaled == pytest.approx(lam * base, rel=1e-9)


@given(alpha=logf(-3, 3), wa=logf(13, 18), nu=logf(10, 17))
@settings(max_examples=30)
def test_hydrogenic_linear_in_alpha(alpha, wa, nu):
    one = hydrogenic_lorentzian_rate(1.0, 1e19, wa, nu)
    assert hydrogenic_lorentzian_rate(alpha, 1e19, wa, nu) == pytest.approx(alpha * one, rel=1e-12)


@given(wa=logf(13, 17), a=logf(10, 16.9), b=logf(10, 16.9))
@settings(max_examples=60)
def test_antizeno_monotone_in_dephasing(wa, a, b):
    lo, hi = sorted((a, b))
    if hi <= lo * (1 + 1e-6):
        return
    assert hydrogenic_lorentzian_rate(1, 1e19, wa, lo) < hydrogenic_lorentzian_rate(1, 1e19, wa, hi)


@given(g=pos, gam=pos, a=logf(-4, 2), b=logf(-4, 2))
def test_zeno_rate_monotone_in_interval(g, gam, a, b):
    lo, hi = sorted((a, b))
    if hi <= lo * (1 + 1e-6):
        return
    r_lo = lorentzian_interrupted_rate(g, gam, 0.0, lo)
    r_hi = lorentzian_interrupted_rate(g, gam, 0.0, hi)
    assert 0 < r_lo < r_hi <= 2 * g * g / gam * (1 + 1e-12)


@given(c=logf(-2, 2), nu=logf(4, 8), delta=st.floats(-1e8, 1e8))
@settings(max_examples=25, deadline=None)
def test_rate_quadratic_in_coupling(c, nu, delta):
    line = LorentzianMode(2e6, 5e6, 3e15)
    scaled = LorentzianMode(2e6 * c, 5e6, 3e15)
    f = LorentzianFilter(nu)
    k1 = universal_rate(line, f, 3e15 + delta).kappa_s
    k2 = universal_rate(scaled, f, 3e15 + delta).kappa_s
    assert k2 == pytest.approx(c * c * k1, rel=1e-8)


@given(tau=logf(-10, -6), delta=st.floats(-3e8, 3e8))
@settings(max_examples=25, deadline=None)
def test_sinc_overlap_equals_kernel_form(tau, delta):
    line = LorentzianMode(2e6, 5e6, 3e15)
    k = universal_rate(line, SincSquaredFilter(tau), 3e15 + delta).kappa_s
    ref = lorentzian_interrupted_rate(2e6, 5e6, delta, tau)
    assert k == pytest.approx(ref, rel=1e-6)


@given(g=logf(5, 7), gam=logf(5, 7), delta=st.floats(-1e8, 1e8), gb=st.floats(0, 1e6),
       tau=logf(-9, -7), n=st.integers(1, 15))
@settings(max_examples=30, deadline=None)
def test_population_is_a_probability(g, gam, delta, gb, tau, n):
    sys_ = CompositeResponse(LorentzianMode(g, gam, 3e15), gb)
    trace = interrupted_evolution(sys_, delta, MeasurementSchedule(tau, n=n))
    assert np.all(trace.population >= 0) and np.all(trace.population <= 1)
    at = np.interp(trace.interruptions, trace.times, trace.population)
    assert np.all(np.diff(np.concatenate(([1.0], at))) <= 1e-15)


names = st.sampled_from(["tau", "nu", "g_s", "gamma_s", "omega_a", "delta", "t_max"])


@given(values=st.dictionaries(names, st.floats(allow_nan=False, allow_infinity=False), max_size=6),
       n=st.one_of(st.none(), st.integers(1, 10 ** 6)))
def test_config_round_trip(values, n):
    if n is not None:
        values = dict(values, n=n)
    cfg = build_config("rate", values)
    assert RunConfig.from_text(cfg.to_text()) == cfg
