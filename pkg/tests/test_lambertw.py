import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import lambertw as scipy_lambertw

from extgev.lambertw import check_lambert_bounds, lambert_w, lambert_w_array


def test_special_values():
    assert lambert_w(0.0).w == 0.0
    assert abs(lambert_w(math.e).w - 1.0) <= 1e-12


@pytest.mark.parametrize("x", [-1.0, math.nan, math.inf])
def test_rejects_bad_input(x):
    with pytest.raises(ValueError):
        lambert_w(x)


def test_residual_certificate_on_log_grid():
    xs = np.concatenate([[0.0], np.logspace(-15, 12, 800)])
    for x in xs:
        ev = lambert_w(float(x))
        assert ev.certified
        assert ev.residual <= 1e-12 * max(x, 1.0)


def test_against_scipy_oracle():
    xs = np.logspace(-10, 12, 500)
    ours = lambert_w_array(xs)
    ref = scipy_lambertw(xs, 0).real
    np.testing.assert_allclose(ours, ref, rtol=1e-13, atol=1e-300)


@settings(max_examples=200)
@given(x=st.floats(0.0, 1e12, allow_nan=False))
def test_inverse_property(x):
    w = lambert_w(x).w
    assert w >= 0
    assert abs(w * math.exp(w) - x) <= 1e-12 * max(x, 1.0)


@given(a=st.floats(0.0, 1e10), b=st.floats(0.0, 1e10))
def test_monotone(a, b):
    lo, hi = sorted((a, b))
    assert lambert_w(lo).w <= lambert_w(hi).w


def test_log_bounds_strict_away_from_e():
    xs = np.concatenate([[math.e], np.logspace(math.log10(math.e * (1 + 1e-6)), 12, 2000)])
    rep = check_lambert_bounds(xs)
    assert rep.bounds_hold and rep.strict and rep.passed
    assert rep.equality_points == (math.e,)


def test_identity_x_log_x():
    for x in (2.0, 10.0, 1e3):
        assert lambert_w(x * math.log(x)).w == pytest.approx(math.log(x), rel=1e-10)


def test_bounds_reject_below_e():
    with pytest.raises(ValueError):
        check_lambert_bounds([2.0, 3.0])


def test_array_raises_on_bad_point():
    with pytest.raises(ValueError):
        lambert_w_array([1.0, -2.0])
