"""Principal branch of the Lambert W function on ``[0, inf)``.

Every evaluation carries its residual ``|w e^w - x|``; the residual bound
``1e-12 * max(x, 1)`` is the contract, the iteration count is not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

RESIDUAL_RTOL = 1e-12
STEP_TOL = 1e-14
MAX_ITER = 50


@dataclass(frozen=True)
class LambertEval:
    x: float
    w: float
    residual: float
    iterations: int

    @property
    def certified(self) -> bool:
        return self.residual <= RESIDUAL_RTOL * max(self.x, 1.0)


def _initial_guess(x: float) -> float:
    if x < 0.5:
        return x - x * x
    if x <= math.e:
        return math.log1p(x) * 0.8
    lx = math.log(x)
    return lx - math.log(lx)


def lambert_w(x: float) -> LambertEval:
    """Evaluate ``W(x)`` for ``x >= 0``.

    Halley iteration from an asymptotic (large ``x``) or series (small ``x``)
    start, kept inside a bracket ``[lo, hi]`` on which ``w e^w - x`` changes
    sign; steps leaving the bracket are replaced by bisection.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    if x < 0:
        raise ValueError(f"x must be >= 0 (principal branch on [0, inf)), got {x}")
    if x == 0.0:
        return LambertEval(0.0, 0.0, 0.0, 0)

    # W(x) <= min(x, 1) below e and W(x) <= ln x above it
    lo, hi = 0.0, (min(x, 1.0) if x < math.e else math.log(x))
    w = min(max(_initial_guess(x), lo), hi)
    it = 0
    for it in range(1, MAX_ITER + 1):
        ew = math.exp(w)
        f = w * ew - x
        if f > 0:
            hi = min(hi, w)
        elif f < 0:
            lo = max(lo, w)
        else:
            break
        wp1 = w + 1.0
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w_new = w - step
        if not (lo <= w_new <= hi):
            w_new = 0.5 * (lo + hi)
        done = abs(w_new - w) <= STEP_TOL * max(abs(w_new), 1.0)
        w = w_new
        if done:
            break
    residual = abs(w * math.exp(w) - x)
    return LambertEval(x, w, residual, it)


def lambert_w_array(xs) -> np.ndarray:
    """``W`` at every point of ``xs``; raises if any residual is uncertified."""
    xs = np.asarray(xs, dtype=float)
    out = np.empty_like(xs)
    for i, x in np.ndenumerate(xs):
        ev = lambert_w(x)
        if not ev.certified:
            raise ArithmeticError(f"Lambert W residual {ev.residual:.3e} too large at x={x}")
        out[i] = ev.w
    return out


@dataclass(frozen=True)
class BoundsReport:
    """Check of ``ln x - ln ln x <= W(x) <= ln x - (1/2) ln ln x`` on ``x >= e``.

    Equality is expected only at ``x = e``; ``strict`` records strict
    inequality on both sides at every other point.
    """

    xs: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    lower: np.ndarray = field(repr=False)
    upper: np.ndarray = field(repr=False)
    bounds_hold: bool
    strict: bool
    equality_points: tuple[float, ...]
    identity_points: tuple[float, ...]
    identity_max_rel_err: float

    @property
    def passed(self) -> bool:
        return self.bounds_hold and self.strict and self.identity_max_rel_err <= 1e-10


def check_lambert_bounds(xs, identity_points=(2.0, 10.0, 1e3), eq_tol: float = 1e-12) -> BoundsReport:
    """Verify the two-sided logarithmic bound and ``W(x ln x) = ln x``.

    Parameters
    ----------
    xs : array_like
        Points ``>= e`` for the bounds.
    identity_points : sequence of float
        Points ``> 1`` at which ``W(x ln x) = ln x`` is checked (relative error).
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if np.any(xs < math.e):
        raise ValueError("bounds are only stated for x >= e")
    w = lambert_w_array(xs)
    lx = np.log(xs)
    llx = np.log(lx)
    lower = lx - llx
    upper = lx - 0.5 * llx
    at_e = np.abs(xs - math.e) <= eq_tol * math.e
    hold = bool(np.all(lower <= w + eq_tol) and np.all(w <= upper + eq_tol))
    strict = bool(np.all((lower < w)[~at_e]) and np.all((w < upper)[~at_e]))
    eq_pts = tuple(float(x) for x in xs[at_e] if abs(lambert_w(x).w - 1.0) <= eq_tol)

    errs = []
    for x0 in identity_points:
        if not x0 > 1:
            raise ValueError("identity W(x ln x) = ln x needs x > 1")
        target = math.log(x0)
        errs.append(abs(lambert_w(x0 * target).w - target) / target)
    return BoundsReport(
        xs=xs,
        w=w,
        lower=lower,
        upper=upper,
        bounds_hold=hold,
        strict=strict,
        equality_points=eq_pts,
        identity_points=tuple(float(p) for p in identity_points),
        identity_max_rel_err=max(errs) if errs else 0.0,
    )
