r"""Extended Gevrey weight sequences :math:`M_p^{\tau,\sigma} = p^{\tau p^\sigma}`.

Everything here works on :math:`\ln M_p`. The sequence itself leaves double
range near ``p = 40`` for ``tau = 1, sigma = 2``; every inequality we check
is a product/ratio statement and survives the log transform unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

DEFAULT_PMAX = 200

# relative slack for comparisons between quantities of size |logM|
_REL_SLACK = 1e-12


@dataclass(frozen=True)
class WeightParams:
    """Index ``(tau, sigma)`` of one sequence in the weight matrix.

    Parameters
    ----------
    tau : float
        Regularity parameter, ``tau > 0``.
    sigma : float
        Extension parameter, ``sigma > 1``.
    """

    tau: float
    sigma: float

    def __post_init__(self):
        tau, sigma = float(self.tau), float(self.sigma)
        if not (math.isfinite(tau) and tau > 0):
            raise ValueError(f"tau must be a finite number > 0, got {self.tau!r}")
        if not (math.isfinite(sigma) and sigma > 1):
            raise ValueError(f"sigma must be a finite number > 1, got {self.sigma!r}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "sigma", sigma)

    def with_tau(self, tau: float) -> "WeightParams":
        return WeightParams(tau, self.sigma)

    def scaled(self, factor: float) -> "WeightParams":
        return WeightParams(self.tau * factor, self.sigma)


def log_weight(p: int, params: WeightParams) -> float:
    r"""Return :math:`\ln M_p^{\tau,\sigma} = \tau p^\sigma \ln p` (zero for ``p <= 1``)."""
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    if p <= 1:
        return 0.0
    pf = float(p)
    return params.tau * pf**params.sigma * math.log(pf)


def _log_weight_array(ps: np.ndarray, tau: float, sigma: float) -> np.ndarray:
    """Vectorized ``log_weight`` for enumerations that do not need bitwise agreement."""
    ps = np.asarray(ps, dtype=float)
    safe = np.maximum(ps, 1.0)
    return np.where(ps >= 2, tau * safe**sigma * np.log(safe), 0.0)


@lru_cache(maxsize=64)
def _table_values(params: WeightParams, pmax: int) -> np.ndarray:
    # Built from the scalar routine so that table entries are bit-identical
    # to log_weight(p); associated_value relies on this for exact oracles.
    values = np.fromiter(
        (log_weight(p, params) for p in range(pmax + 1)), dtype=float, count=pmax + 1
    )
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class LogWeightTable:
    """Precomputed ``logM[p] = ln M_p`` for ``0 <= p <= pmax``."""

    params: WeightParams
    pmax: int
    logM: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, params: WeightParams, pmax: int = DEFAULT_PMAX) -> "LogWeightTable":
        pmax = int(pmax)
        if pmax < 1:
            raise ValueError(f"pmax must be >= 1, got {pmax}")
        return cls(params, pmax, _table_values(params, pmax))

    def __post_init__(self):
        if len(self.logM) != self.pmax + 1:
            raise ValueError("logM must have length pmax + 1")

    def __getitem__(self, p):
        return self.logM[p]

    def __len__(self):
        return self.pmax + 1


def power_inequality_holds(sigma: float, pmax: int) -> bool:
    r"""Check :math:`(p+q)^\sigma \le 2^{\sigma-1}(p^\sigma + q^\sigma)` for ``1 <= p, q <= pmax``."""
    p = np.arange(1, pmax + 1, dtype=float)
    lhs = (p[:, None] + p[None, :]) ** sigma
    rhs = 2.0 ** (sigma - 1) * (p[:, None] ** sigma + p[None, :] ** sigma)
    return bool(np.all(lhs <= rhs * (1 + _REL_SLACK)))


@dataclass(frozen=True)
class IntegerSup:
    """Supremum of a sequence over ``0 <= p <= pmax`` with a tail certificate.

    ``tail_decreasing`` is True when ``argmax < pmax`` and every forward
    difference past ``argmax`` is non-positive: the maximand is already
    falling when the range ends.
    """

    log_value: float
    argmax: int
    pmax: int
    tail_decreasing: bool


def _first_argmax(values: np.ndarray) -> int:
    # first index within rounding of the maximum; plateaus are common here
    top = float(np.max(values))
    return int(np.argmax(values >= top - _REL_SLACK * max(1.0, abs(top))))


def _sup_with_tail(values: np.ndarray, offset: int = 0) -> IntegerSup:
    k = _first_argmax(values)
    tail = np.diff(values[k:])
    scale = max(1.0, float(np.max(np.abs(values[k:]))))
    # a maximum on the last index certifies nothing
    ok = k < len(values) - 1 and bool(np.all(tail <= _REL_SLACK * scale))
    return IntegerSup(float(values[k]), k + offset, len(values) - 1 + offset, ok)


def _adaptive_sup(summand, start: int, cap: int = 1 << 24) -> IntegerSup:
    """Enumerate ``summand(p)`` on ``0..pmax``, doubling ``pmax`` until the
    argmax sits in the lower half and the tail is certified decreasing."""
    pmax = max(int(start), 8)
    while True:
        p = np.arange(pmax + 1, dtype=float)
        sup = _sup_with_tail(summand(p))
        if sup.tail_decreasing and 2 * sup.argmax <= pmax:
            return sup
        if pmax >= cap:
            raise ArithmeticError(
                f"supremum not certified up to p = {pmax}; argmax at {sup.argmax}"
            )
        pmax *= 2


def sup_geometric_over_weight(h: float, params: WeightParams) -> tuple[float, float]:
    r"""Closed form of :math:`\ln\sup_{\rho>0} h^{\rho^\sigma}/\rho^{\tau\rho^\sigma}`.

    Returns
    -------
    log_value : float
        :math:`\frac{\tau}{\sigma e} h^{\sigma/\tau}`.
    maximizer : float
        :math:`\rho_0 = h^{1/\tau} e^{-1/\sigma}`.
    """
    if not h > 0:
        raise ValueError(f"h must be > 0, got {h}")
    tau, sigma = params.tau, params.sigma
    log_h = math.log(h)
    value = tau / (sigma * math.e) * math.exp(sigma / tau * log_h)
    rho0 = math.exp(log_h / tau - 1.0 / sigma)
    return value, rho0


def absorption_certificate(
    h: float, params: WeightParams, pmax: int = DEFAULT_PMAX
) -> IntegerSup:
    r"""Enumerated :math:`\sup_p [p^\sigma\ln h + \ln M_p^{\tau/2,\sigma} - \ln M_p^{\tau,\sigma}]`.

    The range grows past ``pmax`` when needed, until the maximizer is well
    inside it and the summand is decreasing on the tail.
    """
    if not h > 0:
        raise ValueError(f"h must be > 0, got {h}")
    log_h = math.log(h)
    tau, sigma = params.tau, params.sigma

    def summand(p):
        return p**sigma * log_h + _log_weight_array(p, tau / 2, sigma) - _log_weight_array(
            p, tau, sigma
        )

    return _adaptive_sup(summand, pmax)


def absorption_constant(h: float, params: WeightParams, pmax: int = DEFAULT_PMAX) -> float:
    """``ln C`` with ``h^{p^sigma} M_p^{tau/2} <= C M_p^{tau}`` for every ``p >= 0``."""
    return absorption_certificate(h, params, pmax).log_value


def factorial_domination(params: WeightParams, pmax: int = DEFAULT_PMAX) -> IntegerSup:
    """``ln C1 = max_p [ln p! - ln M_p]`` over ``0..pmax``."""
    table = LogWeightTable.build(params, pmax)
    p = np.arange(pmax + 1, dtype=float)
    return _sup_with_tail(gammaln(p + 1) - table.logM)


@dataclass(frozen=True)
class ConditionReport:
    """Numerical verification of the sequence conditions on ``p, q <= pmax``.

    Constants are range-restricted: they are the smallest values that work
    on the enumerated range, not claims about the global constants.
    """

    params: WeightParams
    pmax: int
    # (M.1) log-convexity
    m1_holds: bool
    m1_min_margin: float
    # log-superadditivity lnM(p) + lnM(q) <= lnM(p+q)
    superadditive_holds: bool
    # ~(M.2): minimal ln C and where it is attained
    m2_log_c: float
    m2_argmax: tuple[int, int]
    m2_tail_decreasing: bool
    # ~(M.2)': minimal ln C
    m2p_log_c: float
    m2p_argmax: int
    m2p_tail_decreasing: bool
    # (M.3)': partial sums and per-term bound ln(M_{p-1}/M_p) <= -tau (p-1)^{sigma-1} ln(2p)
    m3_partial_sums: np.ndarray = field(repr=False)
    m3_log_ratio: np.ndarray = field(repr=False)
    m3_log_bound: np.ndarray = field(repr=False)
    m3_bound_holds: bool = False
    # almost increasing ((M_p / p!)^{1/p})
    almost_increasing_log_c: float = 0.0
    power_inequality_holds: bool = False
    factorial: IntegerSup | None = None

    @property
    def all_hold(self) -> bool:
        return (
            self.m1_holds
            and self.superadditive_holds
            and self.m3_bound_holds
            and self.power_inequality_holds
            and self.m2_tail_decreasing
            and self.m2p_tail_decreasing
            and math.isfinite(self.m2_log_c)
            and math.isfinite(self.m2p_log_c)
        )


def _m2_ratios(params: WeightParams, pmax: int) -> np.ndarray:
    """Matrix of ``[lnM(p+q) - lnM'(p) - lnM'(q)] / (p^sigma + q^sigma)``, ``lnM'`` at ``2^{sigma-1} tau``."""
    tau, sigma = params.tau, params.sigma
    big = LogWeightTable.build(params, 2 * pmax).logM
    inflated = LogWeightTable.build(params.scaled(2.0 ** (sigma - 1)), pmax).logM
    p = np.arange(pmax + 1)
    num = big[p[:, None] + p[None, :]] - inflated[:, None] - inflated[None, :]
    den = p[:, None].astype(float) ** sigma + p[None, :].astype(float) ** sigma
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = num / den
    ratio[0, 0] = -np.inf
    return ratio


def check_conditions(params: WeightParams, pmax: int = DEFAULT_PMAX) -> ConditionReport:
    """Verify the sequence conditions by enumeration over ``p, q <= pmax``."""
    pmax = int(pmax)
    if pmax < 3:
        raise ValueError(f"pmax must be >= 3 to test three-term conditions, got {pmax}")
    tau, sigma = params.tau, params.sigma
    table = LogWeightTable.build(params, pmax)
    lm = table.logM
    scale = np.maximum(1.0, np.abs(lm))

    margin = lm[:-2] + lm[2:] - 2 * lm[1:-1]
    m1_holds = bool(np.all(margin >= -_REL_SLACK * scale[2:]))

    idx = np.arange(pmax + 1)
    pp, qq = np.meshgrid(idx, idx, indexing="ij")
    mask = pp + qq <= pmax
    sums = lm[np.minimum(pp + qq, pmax)]
    superadd = bool(
        np.all((lm[pp] + lm[qq] <= sums + _REL_SLACK * scale[np.minimum(pp + qq, pmax)])[mask])
    )

    ratio = _m2_ratios(params, pmax)
    flat = _first_argmax(ratio.ravel())
    m2_arg = (flat // (pmax + 1), flat % (pmax + 1))
    m2_log_c = max(0.0, float(ratio.flat[flat]))
    # shell maxima over max(p, q) = k must not increase past the maximizing shell
    shell = np.array([max(ratio[k, : k + 1].max(), ratio[: k + 1, k].max()) for k in range(1, pmax + 1)])
    k0 = _first_argmax(shell)
    m2_tail = bool(np.all(np.diff(shell[k0:]) <= _REL_SLACK * max(1.0, abs(shell[k0]))))

    p1 = np.arange(1, pmax, dtype=float)
    diffs = lm[2:] - lm[1:-1]
    r2p = diffs / p1**sigma
    sup2p = _sup_with_tail(r2p, offset=1)
    m2p_log_c = max(0.0, sup2p.log_value)

    p = np.arange(1, pmax + 1, dtype=float)
    log_ratio = lm[:-1] - lm[1:]
    log_bound = -tau * (p - 1) ** (sigma - 1) * np.log(2 * p)
    m3_holds = bool(np.all(log_ratio <= log_bound + _REL_SLACK * scale[1:]))
    partial = np.cumsum(np.exp(log_ratio))

    log_a = (lm[1:] - gammaln(p + 1)) / p
    running = np.maximum.accumulate(log_a)
    almost_c = max(0.0, float(np.max(running - log_a)))

    return ConditionReport(
        params=params,
        pmax=pmax,
        m1_holds=m1_holds,
        m1_min_margin=float(margin.min()),
        superadditive_holds=superadd,
        m2_log_c=m2_log_c,
        m2_argmax=m2_arg,
        m2_tail_decreasing=m2_tail,
        m2p_log_c=m2p_log_c,
        m2p_argmax=sup2p.argmax,
        m2p_tail_decreasing=sup2p.tail_decreasing,
        m3_partial_sums=partial,
        m3_log_ratio=log_ratio,
        m3_log_bound=log_bound,
        m3_bound_holds=m3_holds,
        almost_increasing_log_c=almost_c,
        power_inequality_holds=power_inequality_holds(sigma, pmax),
        factorial=factorial_domination(params, pmax),
    )
