import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid
from scipy.special import gammaln

from extgev.testfn import (
    PolyGaussian,
    characterize,
    fit_entries,
    fit_tau,
    gaussian,
    hermite,
    linear_combination,
    modulated_translated,
    product_index,
    seminorm_l2,
    seminorm_sup,
    seminorm_table,
    sum_index,
    tensor,
)
from extgev.weights import LogWeightTable, WeightParams


def sup_monomial_gaussian(k, a):
    """sup |x^k e^{-a x^2}| = (k / (2 a e))^{k/2}."""
    return 1.0 if k == 0 else (k / (2 * a * math.e)) ** (k / 2)


def l2_monomial_gaussian(k, a):
    """||x^k e^{-a x^2}||_2 from the Gaussian moment integral."""
    return math.exp(0.5 * (gammaln(k + 0.5) - (k + 0.5) * math.log(2 * a)))


def test_construction_validates():
    with pytest.raises(ValueError):
        PolyGaussian([1.0], [[-1.0]], [0.0])
    with pytest.raises(ValueError):
        PolyGaussian([[1.0]], [[1.0, 0.5], [0.0, 1.0]], [0.0, 0.0])
    with pytest.raises(ValueError):
        gaussian(0.0)
    with pytest.raises(ValueError):
        hermite(-1)


@pytest.mark.parametrize("f", [gaussian(), hermite(0), hermite(3), hermite(7, 2.0),
                               modulated_translated(0.7, -1.2, 3.0)])
def test_unit_norm(f):
    x = np.linspace(-12, 12, 20001)
    nrm = math.sqrt(trapezoid(np.abs(f(x)) ** 2, x))
    assert nrm == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("k", range(0, 9))
@pytest.mark.parametrize("a", [1.0, math.pi])
def test_sup_closed_form(k, a):
    g = gaussian(a, normalized=False)
    res = seminorm_sup(g, k, 0)
    assert res.value == pytest.approx(sup_monomial_gaussian(k, a), rel=1e-10)
    assert not res.on_boundary


@pytest.mark.parametrize("k", range(0, 9))
def test_l2_closed_form(k):
    g = gaussian(1.0, normalized=False)
    assert seminorm_l2(g, k, 0) == pytest.approx(l2_monomial_gaussian(k, 1.0), rel=1e-10)


def test_known_sup_values():
    g = gaussian(1.0, normalized=False)
    assert seminorm_sup(g, 1, 0).value == pytest.approx(1 / math.sqrt(2 * math.e), rel=1e-12)
    assert seminorm_sup(g, 0, 1).value == pytest.approx(math.sqrt(2 / math.e), rel=1e-12)


def _fd(f, x, h=1e-3):
    """Fourth-order central difference."""
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


@pytest.mark.parametrize("f", [hermite(4), modulated_translated(0.3, 0.8, 2.0),
                               linear_combination([1.0, 0.5j], [hermite(1), hermite(2)])])
def test_derivative_against_finite_differences(f):
    probes = np.random.default_rng(7).uniform(-2.5, 2.5, 100)
    for order in range(1, 5):
        lower, upper = f.derivative(order - 1), f.derivative(order)
        scale = np.max(np.abs(upper(np.linspace(-3, 3, 601))))
        err = np.max(np.abs(upper(probes) - _fd(lower, probes)))
        assert err <= 1e-9 * max(1.0, scale)


def test_times_monomial():
    f = hermite(2)
    x = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(f.times_monomial(3)(x), x**3 * f(x), rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("k", range(8))
def test_hermite_fourier_eigenfunctions(k):
    f = hermite(k)
    x = np.linspace(-4, 4, 41)
    np.testing.assert_allclose(f.fourier()(x), (-1j) ** k * f(x), atol=1e-13)


def test_fourier_against_quadrature():
    f = modulated_translated(0.5, -0.75, 2.5)
    x = np.linspace(-10, 10, 8001)
    xi = np.linspace(-3, 3, 25)
    oracle = np.array([trapezoid(f(x) * np.exp(-2j * np.pi * x * s), x) for s in xi])
    np.testing.assert_allclose(f.fourier()(xi), oracle, atol=1e-12)


def test_tensor_sup_is_separable():
    g1, g2 = gaussian(), hermite(1)
    G = tensor(g1, g2)
    for al, be in [((0, 0), (0, 0)), ((1, 2), (0, 1)), ((2, 0), (1, 1))]:
        two = seminorm_sup(G, al, be).value
        one = seminorm_sup(g1, al[0], be[0]).value * seminorm_sup(g2, al[1], be[1]).value
        assert two == pytest.approx(one, rel=1e-8)


def test_tensor_l2_is_separable():
    g = gaussian(1.0, normalized=False)
    G = tensor(g, g)
    assert seminorm_l2(G, (1, 2), (0, 0)) == pytest.approx(
        l2_monomial_gaussian(1, 1.0) * l2_monomial_gaussian(2, 1.0), rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(x=st.floats(-6, 6), k=st.integers(0, 5), b=st.integers(0, 5))
def test_sup_dominates_samples(x, k, b):
    f = hermite(3)
    s = seminorm_sup(f, k, b).value
    assert abs(x**k * f.derivative(b)(np.array([x]))[0]) <= s * (1 + 1e-12)


def test_table_layout_and_csv():
    t = seminorm_table(gaussian(), 4)
    assert t.sup.shape == (5, 5) and t.l2.shape == (5, 5)
    assert t.boundary_flags == 0
    lines = t.csv().splitlines()
    assert lines[0] == "alpha,beta,sup,l2" and len(lines) == 26


def test_synthetic_fit_recovers_tau():
    K, sigma, tau0, c0 = 12, 2.0, 0.7, 3.0
    lm = LogWeightTable.build(WeightParams(tau0, sigma), K).logM
    vals = c0 * np.exp(lm[:, None] + lm[None, :])
    fit = fit_entries(vals, product_index(K, sigma))
    assert fit.tau == pytest.approx(tau0, rel=1e-12)
    assert fit.log_c == pytest.approx(math.log(c0), rel=1e-12)


def test_sum_index_dominates_product_index():
    # (A+B)^s ln(A+B) >= A^s ln A + B^s ln B, the log form of M_A M_B <= M_{A+B}
    assert np.all(sum_index(12, 2.0) >= product_index(12, 2.0) - 1e-12)


def test_fit_rejects_small_K():
    with pytest.raises(ValueError):
        fit_tau(seminorm_table(gaussian(), 3, include_l2=False), 2.0)


def test_zero_function():
    z = PolyGaussian([0.0], [[math.pi]], [0.0], 0.0, "zero")
    assert z.is_zero
    t = seminorm_table(z, 4)
    assert np.all(t.sup == 0) and np.all(t.l2 == 0)
    assert fit_tau(t, 2.0).tau == 0.0


@pytest.fixture(scope="module")
def gaussian_report():
    return characterize(gaussian(), 2.0, 12)


def test_characterize_gaussian(gaussian_report):
    rep = gaussian_report
    assert rep.finite and rep.corollary_finite
    assert rep.sum_product_consistent
    assert rep.fourier.tau == rep.decay.tau
    infl = 2.0**rep.sigma
    assert rep.l2.tau <= infl * rep.joint.tau and rep.joint.tau <= infl * rep.l2.tau
    assert math.isfinite(rep.cross_sup_from_l2_log_c) and math.isfinite(rep.cross_l2_from_sup_log_c)


def test_characterize_hermite():
    rep = characterize(hermite(3), 2.0, 8, include_l2=False)
    assert rep.finite and rep.corollary_finite
