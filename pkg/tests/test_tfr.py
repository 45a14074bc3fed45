import math

import numpy as np
import pytest

from extgev.testfn import PolyGaussian, gaussian, hermite, modulated_translated
from extgev.tfr import (
    KINDS,
    Axis,
    LatticeError,
    PhaseSpaceGrid,
    SampledSignal,
    ambiguity,
    fourier,
    grossmann_royer,
    grossmann_royer_closed_form,
    invert,
    inverse_fourier,
    lemma_checks,
    moyal_check,
    moyal_constant,
    stft,
    symmetry_checks,
    tfr,
    tfr_membership,
    wigner,
)

AX = Axis.symmetric(8.0, 256)
SMALL = PhaseSpaceGrid.from_points(np.linspace(-2, 2, 17), np.linspace(-2, 2, 17))


def unit_closed_forms(X, W):
    r2 = X**2 + W**2
    return {
        "grossmann-royer": np.exp(-2 * np.pi * r2),
        "wigner": 2 * np.exp(-2 * np.pi * r2),
        "stft": np.exp(-1j * np.pi * X * W) * np.exp(-np.pi * r2 / 2),
        "ambiguity": np.exp(-np.pi * r2 / 2),
    }


@pytest.mark.parametrize("kind", KINDS)
def test_unit_gaussian_closed_forms(kind):
    u = gaussian()
    X, W = np.meshgrid(SMALL.x.points, SMALL.w.points, indexing="ij")
    res = tfr(kind, u, u, SMALL)
    np.testing.assert_allclose(res.values, unit_closed_forms(X, W)[kind], atol=1e-13)


@pytest.mark.parametrize("kind", KINDS)
def test_unit_gaussian_closed_forms_sampled(kind):
    s = SampledSignal.from_function(gaussian(), AX)
    grid = PhaseSpaceGrid.fast_default(AX, kind)
    res = tfr(kind, s, s, grid, "fast")
    keep = (np.abs(grid.x.points) <= 3)[:, None] & (np.abs(grid.w.points) <= 3)[None, :]
    X, W = np.meshgrid(grid.x.points, grid.w.points, indexing="ij")
    np.testing.assert_allclose(res.values[keep], unit_closed_forms(X, W)[kind][keep], atol=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_fast_matches_reference(kind):
    f = SampledSignal.from_function(modulated_translated(0.4, 0.9, 2.5), AX)
    g = SampledSignal.from_function(hermite(2), AX)
    full = PhaseSpaceGrid.fast_default(AX, kind)
    # every 8th x row, every w column of the fast lattice
    grid = PhaseSpaceGrid(Axis(full.x.center, full.x.step * 8, full.x.count // 8), full.w)
    a = tfr(kind, f, g, grid, "fast").values
    b = tfr(kind, f, g, grid, "reference").values
    assert np.max(np.abs(a - b)) <= 1e-10


def test_closed_form_matches_quadrature():
    f = modulated_translated(0.3, -0.5, 2.0)
    g = modulated_translated(-0.2, 0.4, 4.0)
    R = grossmann_royer_closed_form(f, g)
    X, W = np.meshgrid(SMALL.x.points, SMALL.w.points, indexing="ij")
    ref = grossmann_royer(f, g, SMALL).values
    np.testing.assert_allclose(R(np.stack([X.ravel(), W.ravel()], axis=1)).reshape(X.shape), ref, atol=1e-13)


def test_closed_form_rejects_polynomial_factor():
    with pytest.raises(ValueError):
        grossmann_royer_closed_form(hermite(1), gaussian())


def test_moyal_constant_unit_gaussian():
    # <R, R> for R = exp(-2 pi (x^2 + w^2)) integrates to 1/4
    assert moyal_constant(1) == 0.25
    res = moyal_check(gaussian(), gaussian(), gaussian(), gaussian(), quad=AX)
    assert res.lhs.real == pytest.approx(0.25, abs=1e-13)
    assert res.rel_err <= 1e-12


def test_moyal_mixed_quadruples():
    fs = [hermite(0), hermite(3), modulated_translated(0.5, -0.3, 3.0), modulated_translated(-1, 1, 2)]
    for i in range(4):
        f1, g1, f2, g2 = fs[i], fs[(i + 1) % 4], fs[(i + 2) % 4], fs[(i + 3) % 4]
        assert moyal_check(f1, g1, f2, g2, quad=AX).rel_err <= 1e-8


def test_moyal_rejects_uncontained_signal():
    wide = modulated_translated(7.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        moyal_check(wide, gaussian(), gaussian(), gaussian(), quad=AX)


@pytest.mark.parametrize("f", [gaussian(), hermite(2), modulated_translated(0.5, 0.5, 3.0)])
def test_inversion(f):
    s = SampledSignal.from_function(f, AX)
    g1 = SampledSignal.from_function(gaussian(), AX)
    g2 = SampledSignal.from_function(gaussian(2 * math.pi), AX)
    R = grossmann_royer(s, g1, PhaseSpaceGrid.fast_default(AX), "fast")
    rec = invert(R, g1, g2)
    assert np.max(np.abs(rec.values - s.values)) <= 1e-6


def test_inversion_rejects_orthogonal_windows():
    s = SampledSignal.from_function(gaussian(), AX)
    h1 = SampledSignal.from_function(hermite(1), AX)
    R = grossmann_royer(s, s, PhaseSpaceGrid.fast_default(AX), "fast")
    with pytest.raises(ValueError):
        invert(R, s, h1)


def test_fourier_fixed_point_and_round_trip():
    s = SampledSignal.from_function(gaussian(), AX)
    F = fourier(s)
    assert np.max(np.abs(F.values - s.values)) <= 1e-10
    back = inverse_fourier(F, s.axis.center)
    assert np.max(np.abs(back.values - s.values)) <= 1e-12


def test_fourier_shifted_axes():
    f = modulated_translated(0.5, 1.0, 2.0)
    ax = Axis(0.5, 1 / 16, 256)
    F = fourier(SampledSignal.from_function(f, ax), freq_center=1.0)
    np.testing.assert_allclose(F.values, f.fourier()(F.axis.points), atol=1e-12)


def test_lemma_relations_and_bound():
    grid = PhaseSpaceGrid.from_points(np.linspace(-2, 2, 33), np.linspace(-2, 2, 33))
    for f, g in [(gaussian(), hermite(1)), (hermite(2), modulated_translated(0.5, 0.3, 2.0))]:
        rep = lemma_checks(f, g, grid)
        assert rep.wigner_vs_gr <= 1e-8 and rep.stft_vs_gr <= 1e-8 and rep.ambiguity_vs_gr <= 1e-8
        assert rep.property1_ratio <= 1 + 1e-12


def test_symmetries():
    rep = symmetry_checks(hermite(1), modulated_translated(0.2, -0.4, 2.5), SMALL)
    assert rep.conjugate_swap <= 1e-8
    assert rep.fourier_rotation <= 1e-8
    assert rep.translate_modulate <= 1e-8


def test_wrappers_name_kinds():
    u = gaussian()
    for fn, kind in [(grossmann_royer, "grossmann-royer"), (stft, "stft"), (wigner, "wigner"), (ambiguity, "ambiguity")]:
        assert fn(u, u, SMALL).kind == kind


def test_lattice_errors():
    s = SampledSignal.from_function(gaussian(), AX)
    bad_x = PhaseSpaceGrid(Axis(0.01, 0.0625, 4), Axis(0.0, 0.1, 4))
    with pytest.raises(LatticeError):
        tfr("stft", s, s, bad_x)
    bad_w = PhaseSpaceGrid(Axis(0.0, 0.0625, 4), Axis(0.0, 0.013, 4))
    with pytest.raises(LatticeError):
        tfr("stft", s, s, bad_w, "fast")


def test_invalid_arguments():
    u = gaussian()
    with pytest.raises(ValueError):
        tfr("born-jordan", u, u, SMALL)
    with pytest.raises(ValueError):
        tfr("stft", u, u, SMALL, mode="slow")
    with pytest.raises(ValueError):
        SampledSignal(Axis(0, 0.1, 3), np.zeros(3))
    with pytest.raises(ValueError):
        Axis(0, -1.0, 4)


def test_sampled_signal_is_zero_outside():
    s = SampledSignal.from_function(gaussian(), AX)
    assert s.at(np.array([100.0]))[0] == 0
    assert s.norm() == pytest.approx(1.0, abs=1e-12)


def test_thread_count_does_not_change_results(monkeypatch):
    s = SampledSignal.from_function(hermite(3), AX)
    grid = PhaseSpaceGrid.fast_default(AX, "wigner")
    monkeypatch.setenv("EXTGEV_THREADS", "1")
    a = tfr("wigner", s, s, grid, "fast").values
    monkeypatch.setenv("EXTGEV_THREADS", "4")
    b = tfr("wigner", s, s, grid, "fast").values
    assert np.array_equal(a, b)
    monkeypatch.setenv("EXTGEV_THREADS", "zero")
    with pytest.raises(ValueError):
        tfr("wigner", s, s, grid, "fast")


def test_tfr_membership_unit_pair():
    rep = tfr_membership(gaussian(), gaussian(), 2.0, K=4)
    assert math.isfinite(rep.joint.tau) and math.isfinite(rep.joint.log_c)


def test_tfr_membership_zero():
    z = PolyGaussian([0.0], [[math.pi]], [0.0], 0.0, "zero")
    rep = tfr_membership(z, gaussian(), 2.0, K=4)
    assert rep.joint.tau == 0.0
