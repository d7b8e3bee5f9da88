import math

import numpy as np
import pytest

from zenodecay.errors import DomainError, ValidityError
from zenodecay.filters import (LorentzianFilter, SincSquaredFilter, eval_filter, width_from_cw,
                               width_from_noise)
from zenodecay.quadrature import feature_points, integrate_panels


def test_sinc_peak_and_zeros():
    f = SincSquaredFilter(2e-8)
    assert f(0.0) == pytest.approx(f.peak()) == pytest.approx(2e-8 / (2 * math.pi))
    for k in (1, 2, 5):
        assert f(k * f.width) == pytest.approx(0.0, abs=1e-12 * f.peak())


def test_sinc_matches_cosine_form():
    tau = 3e-8
    f = SincSquaredFilter(tau)
    d = np.array([1e5, 2.2e7, -8e8])
    assert np.allclose(f(d), (1 - np.cos(d * tau)) / (math.pi * tau * d * d), rtol=1e-12)


def test_sinc_unit_area():
    tau = 1.0
    f = SincSquaredFilter(tau)
    pts = feature_points([(0.0, f.width)], 0.0, 1e3, multiples=np.arange(0, 101))
    near, _ = integrate_panels(f, pts, epsrel=1e-12)
    # beyond 1e3 the average of (1 - cos)/(pi d^2) is 1/(pi d^2)
    total = 2 * (near + 1.0 / (math.pi * tau * 1e3))
    assert total == pytest.approx(1.0, abs=1e-6)


def test_lorentzian_peak_half_width_and_area():
    f = LorentzianFilter(3.0)
    assert f(0.0) == pytest.approx(1 / (3 * math.pi))
    assert f(3.0) == pytest.approx(0.5 * f.peak())
    area, _ = integrate_panels(f, [0.0, 3.0, 30.0], tail=True, epsrel=1e-13)
    assert 2 * area == pytest.approx(1.0, rel=1e-10)


def test_eval_filter_vectorized():
    f = LorentzianFilter(1.0)
    out = eval_filter(f, np.array([0.0, 1.0]))
    assert out.shape == (2,)


def test_noise_and_cw_widths():
    assert width_from_noise(4e12, 1e-9) == pytest.approx(4e3)
    assert width_from_cw(1e6, 1e8) == pytest.approx(2e4)
    assert LorentzianFilter.from_noise(4e12, 1e-9).nu == pytest.approx(4e3)
    assert LorentzianFilter.from_cw(1e6, 1e8).nu == pytest.approx(2e4)


def test_cw_requires_fast_auxiliary_decay():
    with pytest.raises(ValidityError):
        width_from_cw(1e8, 1e6)


@pytest.mark.parametrize("call", [lambda: SincSquaredFilter(0.0), lambda: LorentzianFilter(-1.0),
                                  lambda: width_from_noise(-1, 1), lambda: width_from_cw(0, 1)])
def test_domain_errors(call):
    with pytest.raises(DomainError):
        call()
