r"""Associated function :math:`T_{\tau,\sigma}(x) = \sup_p \ln(x^p / M_p)` and what is built on it.

Covers the Lambert-W sandwich of ``T``, Komatsu duality, the weight
:math:`\omega_\sigma`, and numerical spot checks of the weight-matrix
conditions {L}, {M.2}', {M}, {N} that feed the nuclearity argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .lambertw import lambert_w, lambert_w_array
from .weights import (
    DEFAULT_PMAX,
    IntegerSup,
    LogWeightTable,
    WeightParams,
    _sup_with_tail,
    absorption_certificate,
    log_weight,
)

DEFAULT_PCAP = 100_000


class AssociatedValue(NamedTuple):
    value: float
    argmax: int
    saturated: bool = False


def _stationary_p(log_x: float, tau: float, sigma: float, pcap: int) -> float:
    """Root in ``[1, inf)`` of ``d/dp [p ln x - tau p^sigma ln p]``, capped at ``pcap``."""
    # g'(p) = ln x - tau p^{sigma-1} (sigma ln p + 1), decreasing on p >= 1
    def dg(p):
        return log_x - tau * p ** (sigma - 1) * (sigma * math.log(p) + 1.0)

    lo = 1.0
    hi = max(2.0, (log_x / tau) ** (1.0 / (sigma - 1)))
    if hi > pcap:
        if dg(float(pcap)) >= 0:
            return float(pcap)
        hi = float(pcap)
    p = 0.5 * (lo + hi)
    for _ in range(200):
        d = dg(p)
        if d > 0:
            lo = p
        else:
            hi = p
        curv = tau * p ** (sigma - 2) * ((sigma - 1) * (sigma * math.log(p) + 1.0) + sigma)
        nxt = p + d / curv
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - p) <= 1e-12 * p or hi - lo <= 1e-12 * hi:
            p = nxt
            break
        p = nxt
    return p


def associated_value(x: float, params: WeightParams, pcap: int = DEFAULT_PCAP) -> AssociatedValue:
    """Evaluate ``T(x)`` and the integer ``p`` attaining it.

    The maximand ``p ln x - ln M_p`` is concave on ``p >= 1``, so its integer
    maximum sits next to the real stationary point; those neighbours are
    compared against ``p = 0, 1``. ``saturated`` is set when the maximizer
    reaches ``pcap`` and the cap has to be raised.
    """
    x = float(x)
    if not x > 0:
        raise ValueError(f"x must be > 0, got {x}")
    return associated_value_log(math.log(x), params, pcap)


def associated_value_log(log_x: float, params: WeightParams, pcap: int = DEFAULT_PCAP) -> AssociatedValue:
    """:func:`associated_value` at ``x = e^{log_x}``, usable beyond the float range of ``x``."""
    log_x = float(log_x)
    if log_x <= 0:
        return AssociatedValue(0.0, 0, False)
    tau, sigma = params.tau, params.sigma
    if log_x <= tau:
        # g'(1) = ln x - tau <= 0: nothing beyond p = 1 can win
        cand = [1]
    else:
        ps = _stationary_p(log_x, tau, sigma, pcap)
        base = int(math.floor(ps))
        cand = [k for k in range(base - 1, base + 3) if 1 <= k <= pcap]
    best_p, best = 0, 0.0
    for k in cand:
        v = float(k) * log_x - log_weight(k, params)
        if v > best:
            best_p, best = k, v
    return AssociatedValue(best, best_p, best_p >= pcap)


def associated_values(xs, params: WeightParams, pcap: int = DEFAULT_PCAP) -> tuple[np.ndarray, np.ndarray]:
    """``T`` and its argmax over an array of points."""
    xs = np.asarray(xs, dtype=float)
    vals = np.empty(xs.shape)
    args = np.empty(xs.shape, dtype=np.int64)
    for i, x in np.ndenumerate(xs):
        v, p, sat = associated_value(x, params, pcap)
        if sat:
            raise ArithmeticError(f"argmax reached pcap={pcap} at x={x}; raise pcap")
        vals[i], args[i] = v, p
    return vals, args


@dataclass(frozen=True)
class AssociatedFunction:
    """Callable ``T_{tau,sigma}`` with a search cap on the integer maximizer."""

    params: WeightParams
    pcap: int = DEFAULT_PCAP

    def __call__(self, x):
        if np.ndim(x) == 0:
            return associated_value(x, self.params, self.pcap).value
        return associated_values(x, self.params, self.pcap)[0]

    def weight(self, x):
        """``w^tau(x) = exp T(|x|)`` with ``w(0) = 1``."""
        return np.exp(self.log_weight(x))

    def log_weight(self, x):
        ax = np.abs(np.asarray(x, dtype=float))
        out = np.zeros(ax.shape)
        pos = ax > 0
        if np.any(pos):
            out[pos] = associated_values(ax[pos], self.params, self.pcap)[0]
        return out if out.ndim else float(out)


def komatsu_dual(p: int, params: WeightParams, n_grid: int = 100) -> float:
    r"""``ln sup_{x>0} x^p e^{-T(x)}`` by grid search in ``u = ln x`` plus golden refinement.

    Only ``T`` is used, so agreement with ``ln M_p`` is a genuine check of the
    duality rather than a restatement of it.
    """
    p = int(p)
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")

    def h(u):
        return p * u - associated_value_log(u, params).value

    # the maximand is concave in u and equals p u for u <= 0, so the max lies at u >= 0
    upper = 1.0
    while True:
        us = np.linspace(0.0, upper, n_grid)
        hs = np.array([h(u) for u in us])
        k = int(np.argmax(hs))
        if k < n_grid - 1:
            break
        upper *= 2.0
        if upper > 1e6:
            raise ArithmeticError("duality search did not bracket a maximum")
    lo, hi = us[max(k - 1, 0)], us[min(k + 1, n_grid - 1)]
    res = minimize_scalar(lambda u: -h(u), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return max(float(hs[k]), -float(res.fun))


def sandwich_envelope(t, params: WeightParams) -> np.ndarray:
    r"""``tau^{-1/(sigma-1)} ln^{sigma/(sigma-1)} t / W^{1/(sigma-1)}(ln t)`` for ``t > 1``."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 1):
        raise ValueError("envelope needs t > 1 so that W(ln t) > 0")
    sigma = params.sigma
    u = np.log(t)
    w = lambert_w_array(u)
    return params.tau ** (-1.0 / (sigma - 1)) * u ** (sigma / (sigma - 1)) / w ** (1.0 / (sigma - 1))


def _envelope_slope(u: np.ndarray, params: WeightParams) -> np.ndarray:
    """``d/du`` of the envelope at ``t = e^u``."""
    sigma = params.sigma
    e = sandwich_envelope(np.exp(u), params)
    w = lambert_w_array(u)
    return e / ((sigma - 1) * u) * (sigma - 1.0 / (1.0 + w))


@dataclass(frozen=True)
class SandwichFit:
    """Constants ``A > 1, B > 0`` with ``E/A - B <= T <= A E + B`` on ``validated_range``.

    ``E`` is :func:`sandwich_envelope`. The constants are certificates for the
    sampled range only.
    """

    params: WeightParams
    A: float
    B: float
    validated_range: tuple[float, float]
    n_fit: int
    n_validate: int
    violations: int
    lower_gap: float  # min over validation grid of T - (E/A - B)
    upper_gap: float  # min over validation grid of (A E + B) - T

    @property
    def validated(self) -> bool:
        return self.violations == 0

    def lower(self, t):
        return sandwich_envelope(t, self.params) / self.A - self.B

    def upper(self, t):
        return self.A * sandwich_envelope(t, self.params) + self.B


def _needed_b(A, env, T):
    return np.maximum(0.0, np.maximum(np.max(env[None, :] / A[:, None] - T[None, :], axis=1),
                                      np.max(T[None, :] - A[:, None] * env[None, :], axis=1)))


def _cell_margin(u, T, P, env, A, params) -> float:
    """Worst drop of either gap function between grid points.

    ``T`` is convex and piecewise affine in ``u`` with slope ``P`` to the right
    of each node. When the envelope is convex in ``u`` as well, tangent and
    chord bounds reduce the drop inside a cell to second-order terms;
    otherwise a Lipschitz bound is used.
    """
    du = np.diff(u)
    slope = _envelope_slope(u, params)
    if np.all(np.diff(slope) >= 0):
        upper = A * (env[1:] - env[:-1] - slope[:-1] * du)
        lower = T[1:] - T[:-1] - P[:-1] * du
        return float(max(np.max(upper), np.max(lower), 0.0))
    lip = P[1:] + A * np.maximum(slope[:-1], slope[1:])
    return 0.5 * float(np.max(du * lip))


def fit_sandwich(
    params: WeightParams,
    t_grid,
    b_cap: float = 1.0,
    lattice_step: float = 1.01,
    a_max: float = 1e6,
    densify: int = 10,
) -> SandwichFit:
    """Smallest lattice ``A`` whose accompanying ``B`` stays below ``b_cap``.

    For each candidate ``A`` the smallest ``B`` that makes both inequalities
    hold on ``t_grid`` is computed. The chosen ``B`` is then widened by a
    margin covering the gaps between grid points, and the pair is
    re-checked on a grid ``densify`` times finer.
    """
    t = np.sort(np.asarray(t_grid, dtype=float))
    if t.size < 2 or np.any(t <= 1):
        raise ValueError("t_grid needs at least two points, all > 1")
    T, P = associated_values(t, params)
    env = sandwich_envelope(t, params)
    n_lat = int(math.ceil(math.log(a_max) / math.log(lattice_step)))
    lattice = lattice_step ** np.arange(1, n_lat + 1)
    need = _needed_b(lattice, env, T)
    ok = np.nonzero(need <= b_cap)[0]
    if ok.size == 0:
        raise ArithmeticError(f"no A <= {a_max:g} satisfies the sandwich with B <= {b_cap}")
    A = float(lattice[ok[0]])
    B0 = float(need[ok[0]])

    u = np.log(t)
    B = B0 + _cell_margin(u, T, P, env, A, params) + 1e-12

    tv = np.exp(np.linspace(u[0], u[-1], densify * (t.size - 1) + 1))
    Tv, _ = associated_values(tv, params)
    ev = sandwich_envelope(tv, params)
    lower_gap = Tv - (ev / A - B)
    upper_gap = (A * ev + B) - Tv
    violations = int(np.sum(lower_gap < 0) + np.sum(upper_gap < 0))
    return SandwichFit(params, A, B, (float(t[0]), float(t[-1])), t.size, tv.size,
                       violations, float(lower_gap.min()), float(upper_gap.min()))


def bmt_weight(t, s: float) -> np.ndarray:
    r"""``ln^s(1+|t|) / W^{s-1}(ln(1+|t|))`` with value 0 at ``t = 0``."""
    if not s > 1:
        raise ValueError("s must be > 1")
    a = np.log1p(np.abs(np.asarray(t, dtype=float)))
    out = np.zeros(a.shape)
    pos = a > 0
    out[pos] = a[pos] ** s / lambert_w_array(a[pos]) ** (s - 1)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class BMTWeight:
    """The weight ``omega_sigma``: the BMT-type weight with exponent ``sigma/(sigma-1)``.

    ``omega_sigma`` has the same growth as ``T_{tau,sigma}``, which is what makes
    the families ``exp(T_{tau,sigma})`` and ``exp(omega_sigma / lambda)`` equivalent.
    """

    sigma: float

    def __post_init__(self):
        if not self.sigma > 1:
            raise ValueError("sigma must be > 1")

    @property
    def exponent(self) -> float:
        return self.sigma / (self.sigma - 1)

    def __call__(self, t):
        return bmt_weight(t, self.exponent)

    def family(self, t, lam: float):
        """``omega^lambda(t) = exp(omega_sigma(t) / lambda)``."""
        return np.exp(self(t) / lam)


@dataclass(frozen=True)
class BMTSpotChecks:
    vanishes_at_zero: bool
    even: bool
    nondecreasing: bool
    doubling_ratio_max: float   # sup omega(2t)/omega(t): bounded under (alpha)
    linear_ratio_max: float     # sup omega(t)/t: bounded under (beta)
    log_ratio_decreasing: bool  # ln t / omega(t) falling at large t, per (gamma)
    convex_in_log: bool         # omega(e^s) convex, per (delta)

    @property
    def passed(self) -> bool:
        return (self.vanishes_at_zero and self.even and self.nondecreasing
                and math.isfinite(self.doubling_ratio_max) and math.isfinite(self.linear_ratio_max)
                and self.log_ratio_decreasing and self.convex_in_log)


def bmt_spot_checks(weight: BMTWeight, t_grid=None) -> BMTSpotChecks:
    """Grid spot checks of the weight-function axioms; detection, not proof."""
    if t_grid is None:
        t_grid = np.logspace(-3, 12, 301)
    t = np.asarray(t_grid, dtype=float)
    w = weight(t)
    s = np.log(t)
    big = t >= 1e3
    second = w[:-2] - 2 * w[1:-1] + w[2:]  # uniform in s for a log grid
    return BMTSpotChecks(
        vanishes_at_zero=weight(0.0) == 0.0,
        even=bool(np.allclose(weight(-t), w, rtol=0, atol=0)),
        nondecreasing=bool(np.all(np.diff(w) >= 0)),
        doubling_ratio_max=float(np.max(weight(2 * t) / w)),
        linear_ratio_max=float(np.max(w / t)),
        log_ratio_decreasing=bool(np.all(np.diff(s[big] / w[big]) < 0)),
        convex_in_log=bool(np.allclose(np.diff(s), np.diff(s)[0]) and np.all(second >= -1e-12 * np.abs(w[1:-1]))),
    )


@dataclass(frozen=True)
class WeightEquivalence:
    """``C1 e^{omega/lam1} <= e^{T} <= C2 e^{omega/lam2}`` fitted in log form."""

    lam1: float
    lam2: float
    log_c1: float
    log_c2: float
    holds: bool


def fit_weight_equivalence(params: WeightParams, x_grid=None) -> WeightEquivalence:
    """Fit the two-sided comparison between ``exp T_{tau,sigma}`` and ``exp(omega_sigma/lambda)``.

    ``1/lam1`` and ``1/lam2`` are the smallest and largest ratios ``T/omega`` on
    ``|x| >= 2``; the constants absorb the rest of the grid.
    """
    if x_grid is None:
        x_grid = np.concatenate([[0.0], np.logspace(-2, 8, 401)])
    x = np.asarray(x_grid, dtype=float)
    om = BMTWeight(params.sigma)(x)
    T = AssociatedFunction(params).log_weight(x)
    far = np.abs(x) >= 2
    ratio = T[far] / om[far]
    inv1, inv2 = float(ratio.min()), float(ratio.max())
    log_c1 = min(0.0, float(np.min(T - om * inv1)))
    log_c2 = max(0.0, float(np.max(T - om * inv2)))
    lo = log_c1 + om * inv1
    hi = log_c2 + om * inv2
    tol = 1e-12 * np.maximum(1.0, np.abs(T))
    holds = bool(np.all(lo <= T + tol) and np.all(T <= hi + tol))
    return WeightEquivalence(1.0 / inv1, 1.0 / inv2, log_c1, log_c2, holds)


# --- weight-matrix conditions -------------------------------------------------

def _breakpoints(params: WeightParams, u_max: float) -> np.ndarray:
    """Kinks of ``u -> T(e^u)`` in ``(0, u_max)``: ``lnM_{p+1} - lnM_p``."""
    pmax = 16
    while True:
        lm = LogWeightTable.build(params, pmax).logM
        d = np.diff(lm)
        if d[-1] > u_max:
            return d[(d > 0) & (d < u_max)]
        pmax *= 2


def _log_integrand_exact(u, lo, hi, n, params, params0):
    """Exact integral of ``exp(n u + T0(e^u) - T(e^u))`` over cells where both are affine."""
    total = 0.0
    for a, b in zip(lo, hi):
        mid = math.exp(0.5 * (a + b))
        p = associated_value(mid, params).argmax
        p0 = associated_value(mid, params0).argmax
        slope = n + p0 - p
        icpt = -log_weight(p0, params0) + log_weight(p, params)
        if slope == 0:
            total += math.exp(icpt) * (b - a)
        else:
            total += (math.exp(icpt + slope * b) - math.exp(icpt + slope * a)) / slope
    return total


def sphere_area(n: int) -> float:
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def radial_weight_integral(params: WeightParams, params0: WeightParams, n: int, R: float,
                           nodes_per_unit: int = 8) -> float:
    r"""``\int_{|x| <= R} w^{tau0}(x) / w^{tau}(x) dx`` in ``R^n``.

    Radial reduction in ``u = ln r``. Nodes are log-spaced and merged with the
    kinks of both associated functions, so the integrand is exponential-affine
    on each cell and every cell is integrated exactly.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    u_max = math.log(R)
    inner = 1.0 / n  # T vanishes on r <= 1: int_0^1 r^{n-1} dr
    if u_max <= 0:
        return sphere_area(n) * R**n / n
    kinks = np.concatenate([_breakpoints(params, u_max), _breakpoints(params0, u_max)])
    grid = np.linspace(0.0, u_max, max(2, int(nodes_per_unit * u_max) + 1))
    nodes = np.unique(np.concatenate([grid, kinks]))
    outer = _log_integrand_exact(None, nodes[:-1], nodes[1:], n, params, params0)
    return sphere_area(n) * (inner + outer)


@dataclass(frozen=True)
class NConditionResult:
    tau0: float
    n: int
    cutoffs: tuple[float, float]
    integrals: tuple[float, float]
    rel_change: float
    tol: float
    tail_decreasing: bool
    stabilizing_cutoff: float | None  # first decade R with rel change <= tol between R and 100 R

    @property
    def stabilized(self) -> bool:
        return self.rel_change <= self.tol and self.tail_decreasing


def check_n_condition(params: WeightParams, n: int, cutoffs=(1e4, 1e6), tol: float = 1e-6,
                      tau0: float | None = None) -> NConditionResult:
    """Integrability of ``w^{tau0} / w^{tau}`` with ``tau0 = 2^sigma tau`` by default."""
    tau0 = params.tau * 2.0**params.sigma if tau0 is None else float(tau0)
    p0 = params.with_tau(tau0)
    r1, r2 = cutoffs
    i1 = radial_weight_integral(params, p0, n, r1)
    i2 = radial_weight_integral(params, p0, n, r2)
    rel = abs(i2 - i1) / abs(i2)

    # log integrand n u + T0 - T must be falling past its maximum on the sampled range
    u = np.linspace(0.0, math.log(r2), 400)
    x = np.exp(u)
    vals = n * u + associated_values(x, p0)[0] - associated_values(x, params)[0]
    k = int(np.argmax(vals))
    tail_ok = k < len(vals) - 1 and bool(np.all(np.diff(vals[k:]) <= 1e-12))

    stab = None
    R = 1e2
    prev = radial_weight_integral(params, p0, n, R)
    while R < 1e40:
        nxt = radial_weight_integral(params, p0, n, R * 100)
        if abs(nxt - prev) <= tol * abs(nxt):
            stab = R
            break
        R, prev = R * 100, nxt
    return NConditionResult(tau0, n, (r1, r2), (i1, i2), rel, tol, tail_ok, stab)


@dataclass(frozen=True)
class MatrixConditionReport:
    """Spot checks of {L}, {M.2}', {M}, {N} (and {wM}, implied by {M}).

    Every constant is the smallest one that works on the sampled range.
    """

    params: WeightParams
    n: int
    L: dict = field(repr=False)       # h -> (direct ln C with tau0 = 2 tau, absorption bound, ok)
    M2p: IntegerSup = None            # ln C with h = 1 and tau0 = 2 tau
    M_log_c: float = 0.0
    M_tau0: float = 0.0
    M_argmax: tuple = ()
    M_interior: bool = False
    wM_implied: bool = True
    N: NConditionResult = None

    @property
    def L_ok(self) -> bool:
        return all(ok for (_, _, ok) in self.L.values())

    @property
    def spot_checks_pass(self) -> bool:
        return (self.L_ok and self.M2p.tail_decreasing and math.isfinite(self.M_log_c)
                and self.M_log_c >= 0 and self.M_interior)

    @property
    def passed(self) -> bool:
        return self.spot_checks_pass and self.N.stabilized


def _l_condition(h: float, params: WeightParams, pmax: int):
    """``ln C`` for ``h^p M_p^{tau} <= C M_p^{2 tau}`` and the absorption bound that dominates it."""
    tau, sigma = params.tau, params.sigma
    log_h = math.log(h)
    lm = LogWeightTable.build(params, pmax).logM
    lm2 = LogWeightTable.build(params.scaled(2.0), pmax).logM
    p = np.arange(pmax + 1, dtype=float)
    direct = _sup_with_tail(p * log_h + lm - lm2)
    bound = absorption_certificate(max(h, 1.0), params.scaled(2.0), pmax)
    ok = direct.tail_decreasing and direct.log_value <= bound.log_value + 1e-12 * max(1.0, abs(bound.log_value))
    return direct.log_value, bound.log_value, ok


def _m_condition(params: WeightParams, tau0: float, n: int, radii: np.ndarray):
    """Lattice max of ``T0(|x+y|) - T(|x|) - T(|y|)``."""
    f = AssociatedFunction(params)
    f0 = AssociatedFunction(params.with_tau(tau0))
    angles = np.array([0.0, math.pi]) if n == 1 else np.linspace(0.0, math.pi, 7)
    tx = f.log_weight(radii)
    best, where = -np.inf, None
    for i, rx in enumerate(radii):
        for j, ry in enumerate(radii):
            # |x + y| for y at angle theta from x; radial weights only see norms
            s = np.sqrt(np.maximum(rx * rx + ry * ry + 2 * rx * ry * np.cos(angles), 0.0))
            vals = f0.log_weight(s) - tx[i] - tx[j]
            k = int(np.argmax(vals))
            if vals[k] > best:
                best, where = float(vals[k]), (float(rx), float(ry), float(angles[k]))
    interior = where[0] < radii[-1] and where[1] < radii[-1]
    return best, where, interior


def check_matrix_conditions(params: WeightParams, n: int = 1, pmax: int = DEFAULT_PMAX,
                            hs=(0.5, 2.0, 10.0), n_cutoffs=(1e4, 1e6)) -> MatrixConditionReport:
    """Numerical spot checks of the weight-matrix conditions; never a proof."""
    if n not in (1, 2):
        raise ValueError("dimension n must be 1 or 2")
    L = {float(h): _l_condition(h, params, pmax) for h in hs}

    lm = LogWeightTable.build(params, pmax + 1).logM
    lm2 = LogWeightTable.build(params.scaled(2.0), pmax).logM
    m2p = _sup_with_tail(lm[1:] - lm2)

    tau0 = params.tau * 2.0**params.sigma
    radii = np.concatenate([[0.0], np.logspace(-2, 8, 31)])
    m_c, m_where, m_int = _m_condition(params, tau0, n, radii)

    N = check_n_condition(params, n, cutoffs=n_cutoffs)
    return MatrixConditionReport(params, n, L, m2p, m_c, tau0, m_where, m_int, True, N)
