"""Verification suites behind ``extgev verify``.

Each check produces a :class:`Record`. A suite passes when every record
passes. The ``anchor`` names the mathematical statement a record checks,
or is ``"plumbing"`` for infrastructure.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import __version__
from .associated import (
    associated_value,
    check_n_condition,
    fit_sandwich,
    komatsu_dual,
)
from .io import digest
from .lambertw import check_lambert_bounds, lambert_w
from .parallel import thread_count
from .testfn import (
    characterize,
    fit_entries,
    gaussian,
    hermite,
    linear_combination,
    modulated_translated,
    product_index,
)
from .tfr import (
    Axis,
    PhaseSpaceGrid,
    SampledSignal,
    fourier,
    grossmann_royer,
    invert,
    inverse_fourier,
    lemma_checks,
    moyal_check,
    symmetry_checks,
    tfr_membership,
)
from .weights import LogWeightTable, WeightParams, check_conditions, sup_geometric_over_weight

DEFAULT_SEED = 20240917
SUITES = ("weights", "lambert", "associated", "membership", "tfr")
TAUS = (0.5, 1.0, 2.0)
SIGMAS = (1.5, 2.0, 3.0)


@dataclass(frozen=True)
class Record:
    name: str
    anchor: str
    inputs_digest: str
    measured: float
    target: float
    tolerance: float
    passed: bool

    def as_dict(self) -> dict:
        return {"name": self.name, "anchor": self.anchor, "inputs_digest": self.inputs_digest,
                "measured": float(self.measured), "target": float(self.target),
                "tolerance": float(self.tolerance), "pass": bool(self.passed)}


@dataclass
class VerificationReport:
    suite: str
    records: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def as_dict(self) -> dict:
        return {"suite": self.suite, "version": self.version, "config": dict(self.config),
                "pass": self.passed, "records": [r.as_dict() for r in self.records]}


def _rec(name, anchor, inputs, measured, target, tol, passed) -> Record:
    if not anchor:
        raise ValueError("every record needs an anchor")
    return Record(name, anchor, digest(inputs), float(measured), float(target), float(tol), bool(passed))


def _at_most(name, anchor, inputs, measured, tol) -> Record:
    return _rec(name, anchor, inputs, measured, 0.0, tol, measured <= tol)


# --- oracles ------------------------------------------------------------------

def numeric_log_sup_rho(h: float, params: WeightParams) -> float:
    """``ln sup_rho h^{rho^sigma} rho^{-tau rho^sigma}`` by grid scan plus golden section in ``ln rho``."""
    tau, sigma = params.tau, params.sigma
    lh = math.log(h)

    def f(u):
        return math.exp(sigma * u) * (lh - tau * u)

    us = np.linspace(-12.0, 12.0, 4001)
    vals = np.exp(sigma * us) * (lh - tau * us)
    k = int(np.argmax(vals))
    if k in (0, us.size - 1):
        raise ArithmeticError("maximum on the scan edge")
    res = minimize_scalar(lambda u: -f(u), bracket=(us[k - 1], us[k], us[k + 1]), method="golden",
                          options={"xtol": 1e-14})
    return max(float(vals[k]), -float(res.fun))


def random_signal(rng: np.random.Generator):
    """A Hermite combination or a modulated, translated Gaussian."""
    if rng.random() < 0.5:
        ks = range(6)
        w = rng.normal(size=6) + 1j * rng.normal(size=6)
        return linear_combination(w / np.linalg.norm(w), [hermite(k) for k in ks], "hermite-combination")
    return modulated_translated(float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1)),
                                float(rng.uniform(2.0, 5.0)))


# --- suites -------------------------------------------------------------------

def suite_weights(cfg: dict) -> list:
    recs = []
    t0 = time.perf_counter()
    worst = 0.0
    for tau in TAUS:
        for sigma in SIGMAS:
            p = WeightParams(tau, sigma)
            for h in (0.5, 1.0, 2.0, 10.0):
                closed, _ = sup_geometric_over_weight(h, p)
                num = numeric_log_sup_rho(h, p)
                worst = max(worst, abs(num - closed) / abs(closed))
    elapsed = time.perf_counter() - t0
    grid = {"tau": TAUS, "sigma": SIGMAS, "h": (0.5, 1, 2, 10)}
    recs.append(_at_most("closed-form sup over rho, max rel err", "sup-of-geometric-over-weight", grid, worst, 1e-9))
    recs.append(_at_most("closed-form sup over rho, runtime s", "plumbing", grid, elapsed, 1.0))

    pmax = 200
    for tau in TAUS:
        for sigma in SIGMAS:
            rep = check_conditions(WeightParams(tau, sigma), pmax)
            inp = {"tau": tau, "sigma": sigma, "pmax": pmax}
            tag = f"tau={tau:g} sigma={sigma:g}"
            recs.append(_rec(f"log-convexity (M.1) {tag}", "log-convexity", inp, rep.m1_min_margin, 0.0, 0.0, rep.m1_holds))
            recs.append(_rec(f"log-superadditivity {tag}", "log-superadditivity", inp, float(rep.superadditive_holds), 1, 0, rep.superadditive_holds))
            recs.append(_rec(f"per-term ratio bound {tag}", "tail-ratio-bound", inp, float(rep.m3_bound_holds), 1, 0, rep.m3_bound_holds))
            recs.append(_rec(f"power inequality {tag}", "power-mean-inequality", inp, float(rep.power_inequality_holds), 1, 0, rep.power_inequality_holds))
            recs.append(_rec(f"~(M.2) constant {tag}", "stability-under-products", inp, rep.m2_log_c, 0, 0,
                             math.isfinite(rep.m2_log_c) and rep.m2_tail_decreasing))
            recs.append(_rec(f"~(M.2)' constant {tag}", "stability-under-shifts", inp, rep.m2p_log_c, 0, 0,
                             math.isfinite(rep.m2p_log_c) and rep.m2p_tail_decreasing))
    return recs


def suite_lambert(cfg: dict) -> list:
    xs = np.concatenate([[0.0], np.logspace(-12, 12, 2001)])
    worst = max(lambert_w(x).residual / max(x, 1.0) for x in xs)
    recs = [_at_most("residual / max(x,1) on [0, 1e12]", "lambert-w-definition", {"grid": "0+logspace(-12,12,2001)"}, worst, 1e-12)]
    we = lambert_w(math.e).w
    recs.append(_rec("W(e) = 1", "lambert-w-special-values", {"x": "e"}, we, 1.0, 1e-12, abs(we - 1.0) <= 1e-12))
    w0 = lambert_w(0.0).w
    recs.append(_rec("W(0) = 0", "lambert-w-special-values", {"x": 0}, w0, 0.0, 0.0, w0 == 0.0))
    # the upper bound touches W to second order at e; closer points are below double resolution
    bx = np.concatenate([[math.e], np.logspace(math.log10(math.e * (1 + 1e-6)), 12, 2000)])
    rep = check_lambert_bounds(bx)
    recs.append(_rec("log bounds hold, strict for x > e", "lambert-w-log-bounds", {"grid": "e..1e12"},
                     float(rep.bounds_hold and rep.strict), 1, 0, rep.bounds_hold and rep.strict))
    recs.append(_at_most("W(x ln x) = ln x at 2, 10, 1e3", "lambert-w-identity", {"x": (2, 10, 1000)},
                         rep.identity_max_rel_err, 1e-10))
    return recs


def suite_associated(cfg: dict) -> list:
    recs = []
    t0 = time.perf_counter()
    worst = 0.0
    for tau in TAUS:
        for sigma in (1.5, 2.0):
            p = WeightParams(tau, sigma)
            lm = LogWeightTable.build(p, 40).logM
            for k in range(1, 41):
                worst = max(worst, abs(komatsu_dual(k, p) - lm[k]))
    elapsed = time.perf_counter() - t0
    inp = {"tau": TAUS, "sigma": (1.5, 2), "p": "1..40"}
    recs.append(_at_most("duality |dual - ln M_p|", "komatsu-duality", inp, worst, 1e-6))
    recs.append(_at_most("duality runtime s", "plumbing", inp, elapsed, 5.0))

    t = np.logspace(math.log10(2.0), 8.0, 200)
    for tau in TAUS:
        for sigma in SIGMAS:
            fit = fit_sandwich(WeightParams(tau, sigma), t)
            ok = math.isfinite(fit.A) and math.isfinite(fit.B) and fit.validated
            recs.append(_rec(f"sandwich A={fit.A:.6g} B={fit.B:.6g} tau={tau:g} sigma={sigma:g}", "lambert-w-sandwich",
                             {"tau": tau, "sigma": sigma, "t": "[2,1e8] x200, check x10"},
                             fit.violations, 0, 0, ok))

    xs = np.logspace(-1, 12, 200)
    mism = 0
    for tau in TAUS:
        for sigma in SIGMAS:
            p = WeightParams(tau, sigma)
            tab = LogWeightTable.build(p, 10**4).logM
            ps = np.arange(10**4 + 1, dtype=float)
            for x in xs:
                brute = max(0.0, float(np.max(ps * math.log(x) - tab)))
                mism += associated_value(x, p).value != brute
    recs.append(_rec("stationary point vs enumeration (exact)", "associated-function", {"x": "logspace(-1,12,200)", "pmax": 10**4},
                     mism, 0, 0, mism == 0))

    for sigma in (1.5, 2.0):
        for n in (1, 2):
            res = check_n_condition(WeightParams(1.0, sigma), n, cutoffs=(1e4, 1e6), tol=1e-6)
            stab = "none" if res.stabilizing_cutoff is None else f"{res.stabilizing_cutoff:.0e}"
            recs.append(_rec(f"{{N}} integral sigma={sigma:g} n={n} (stabilizes from R={stab})", "integrability-condition",
                             {"tau": 1, "sigma": sigma, "n": n, "cutoffs": (1e4, 1e6)},
                             res.rel_change, 0, 1e-6, res.stabilized))
    return recs


def suite_membership(cfg: dict) -> list:
    recs = []
    sigma, K = 2.0, 12
    for f in (gaussian(), hermite(3)):
        rep = characterize(f, sigma, K, include_l2=True)
        inp = {"function": f.label, "sigma": sigma, "K": K}
        recs.append(_rec(f"tau_joint finite: {f.label}", "sup-seminorm-membership", inp, rep.joint.tau, 0, 0, rep.finite))
        infl = 2.0**sigma
        cross = (rep.l2.tau <= infl * rep.joint.tau + 1e-12 and rep.joint.tau <= infl * rep.l2.tau + 1e-12
                 and math.isfinite(rep.cross_sup_from_l2_log_c) and math.isfinite(rep.cross_l2_from_sup_log_c))
        recs.append(_rec(f"sup vs L2 fits within 2^sigma: {f.label}", "l2-versus-sup-seminorms", inp,
                         rep.l2.tau / rep.joint.tau if rep.joint.tau else 0.0, 1.0, infl, cross))
        recs.append(_rec(f"decay corollary finite: {f.label}", "decay-of-members", inp, rep.decay_checks[0].log_sup, 0, 0,
                         rep.corollary_finite))
        if f.label.startswith("gaussian"):
            diff = abs(rep.fourier.tau - rep.decay.tau)
            recs.append(_at_most("tau_fourier = tau_decay (unit Gaussian)", "fourier-symmetric-characterization", inp, diff, 1e-12))

    tau0, c0 = 0.7, 3.0
    lm = LogWeightTable.build(WeightParams(tau0, sigma), K).logM
    synth = c0 * np.exp(lm[:, None] + lm[None, :])
    fit = fit_entries(synth, product_index(K, sigma))
    recs.append(_at_most("synthetic fit returns tau0", "sup-seminorm-membership", {"tau0": tau0, "C": c0, "K": K},
                         abs(fit.tau - tau0) / tau0, 1e-12))

    u = gaussian()
    rep2 = tfr_membership(u, u, sigma, 6)
    recs.append(_rec("2-d table on closed-form R_g f: finite tau", "tfr-membership", {"f": "unit", "g": "unit", "K": 6},
                     rep2.joint.tau, 0, 0, math.isfinite(rep2.joint.tau) and math.isfinite(rep2.joint.log_c)))
    return recs


def suite_tfr(cfg: dict) -> list:
    recs = []
    seed = int(cfg.get("seed", DEFAULT_SEED))
    rng = np.random.default_rng(seed)
    ax = Axis.symmetric(8.0, 256)
    worst, worst_tail = 0.0, 0.0
    for _ in range(10):
        quad = [random_signal(rng) for _ in range(4)]
        res = moyal_check(*quad, quad=ax)
        worst = max(worst, res.rel_err)
        worst_tail = max(worst_tail, res.tail_mass)
    recs.append(_at_most("Moyal identity, 10 random quadruples", "moyal-identity", {"seed": seed, "N": 256, "L": 8}, worst, 1e-8))

    grid = PhaseSpaceGrid.from_points(np.linspace(-2, 2, 33), np.linspace(-2, 2, 33))
    pairs = [(gaussian(), gaussian()), (hermite(2), modulated_translated(0.5, 0.3, 2.0))]
    lem = [lemma_checks(f, g, grid) for f, g in pairs]
    for name, attr in (("W = 2^n R", "wigner_vs_gr"), ("V = phase * R reflected", "stft_vs_gr"),
                       ("A = R reflected", "ambiguity_vs_gr")):
        recs.append(_at_most(f"{name} on 33x33", "transform-relations", {"grid": "33x33 [-2,2]^2"},
                             max(getattr(r, attr) for r in lem), 1e-8))
    p1 = max(r.property1_ratio for r in lem)
    recs.append(_rec("sup |R| <= ||f|| ||g||", "sup-bound", {"grid": "33x33"}, p1, 1.0, 1e-12, p1 <= 1.0 + 1e-12))
    sym = [symmetry_checks(f, g, grid) for f, g in pairs]
    recs.append(_at_most("R_g f = conj R_f g", "conjugate-symmetry", {"grid": "33x33"}, max(s.conjugate_swap for s in sym), 1e-8))
    recs.append(_at_most("R of transforms = rotated R", "fourier-rotation", {"grid": "33x33"}, max(s.fourier_rotation for s in sym), 1e-8))
    recs.append(_at_most("translation-modulation form", "translation-modulation-form", {"grid": "33x33"},
                         max(s.translate_modulate for s in sym), 1e-8))

    su = SampledSignal.from_function(gaussian(), ax)
    g2 = SampledSignal.from_function(gaussian(2.0 * math.pi), ax)
    fg = PhaseSpaceGrid.fast_default(ax)
    for f in (gaussian(), hermite(2)):
        sf = SampledSignal.from_function(f, ax)
        R = grossmann_royer(sf, su, fg, "fast")
        rec = invert(R, su, g2)
        err = float(np.max(np.abs(rec.values - sf.values)))
        recs.append(_at_most(f"inversion {f.label}", "inversion-formula", {"f": f.label, "N": 256, "L": 8}, err, 1e-6))

    F = fourier(su)
    recs.append(_at_most("unit Gaussian is a fixed point", "fourier-convention", {"N": 256, "L": 8},
                         float(np.max(np.abs(F.values - su.values))), 1e-10))
    back = inverse_fourier(F, su.axis.center)
    recs.append(_at_most("fourier round trip", "plumbing", {"N": 256, "L": 8},
                         float(np.max(np.abs(back.values - su.values))), 1e-12))
    return recs


_RUNNERS = {"weights": suite_weights, "lambert": suite_lambert, "associated": suite_associated,
            "membership": suite_membership, "tfr": suite_tfr}


def run_suite(name: str, seed: int = DEFAULT_SEED) -> VerificationReport:
    """Run one suite or ``"all"``."""
    names = SUITES if name == "all" else (name,)
    for n in names:
        if n not in _RUNNERS:
            raise ValueError(f"unknown suite {name!r}; expected one of {SUITES + ('all',)}")
    cfg = {"seed": int(seed), "threads": thread_count()}
    rep = VerificationReport(name, config=cfg)
    for n in names:
        rep.records.extend(_RUNNERS[n](cfg))
    return rep
