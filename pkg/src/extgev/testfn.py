r"""Analytic test functions, their seminorms, and fitted membership parameters.

Every function here is a polynomial times a complex Gaussian,
``P(x) exp(-x^T M x + b.x + c)``. That class is closed under derivatives,
multiplication by monomials and (in one variable) the Fourier transform,
so every seminorm is evaluated on an exact closed form.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import hermite as npherm
from numpy.polynomial import polynomial as npoly

from .associated import associated_values
from .weights import LogWeightTable, WeightParams, check_conditions

SUP_BOUNDARY_RATIO = 1e-3
L2_TAIL_RTOL = 1e-12


def _as_coef(c, n):
    c = np.asarray(c, dtype=complex)
    if c.ndim != n:
        raise ValueError(f"coefficient array must have {n} axes")
    return c


@dataclass(frozen=True)
class PolyGaussian:
    """``P(x) exp(-x^T M x + b.x + c)`` on ``R^n`` with ``Re M`` positive definite.

    ``coef[i1, ..., in]`` multiplies ``x1^i1 ... xn^in``. ``label`` names the
    family for reports.
    """

    coef: np.ndarray
    quad: np.ndarray
    lin: np.ndarray
    const: complex = 0.0
    label: str = "poly-gaussian"

    def __post_init__(self):
        quad = np.atleast_2d(np.asarray(self.quad, dtype=complex))
        n = quad.shape[0]
        if quad.shape != (n, n):
            raise ValueError("quadratic form must be square")
        if not np.allclose(quad, quad.T, rtol=0, atol=1e-14 * max(1.0, np.abs(quad).max())):
            raise ValueError("quadratic form must be symmetric")
        if np.linalg.eigvalsh(quad.real).min() <= 0:
            raise ValueError("Re M must be positive definite")
        object.__setattr__(self, "quad", quad)
        object.__setattr__(self, "lin", np.asarray(self.lin, dtype=complex).reshape(n))
        object.__setattr__(self, "coef", _as_coef(self.coef, n))
        object.__setattr__(self, "const", complex(self.const))

    @property
    def n(self) -> int:
        return self.quad.shape[0]

    @property
    def degree(self) -> int:
        nz = np.argwhere(self.coef != 0)
        return int(nz.sum(axis=1).max()) if nz.size else 0

    @property
    def is_zero(self) -> bool:
        return not np.any(self.coef != 0)

    # --- evaluation ---------------------------------------------------------

    def _points(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.n == 1:
            return x.reshape(-1, 1), x.shape
        if x.shape[-1] != self.n:
            raise ValueError(f"points need a trailing axis of length {self.n}")
        return x.reshape(-1, self.n), x.shape[:-1]

    def _poly(self, pts: np.ndarray) -> np.ndarray:
        if self.n == 1:
            return npoly.polyval(pts[:, 0], self.coef)
        if self.n == 2:
            vx = npoly.polyvander(pts[:, 0], self.coef.shape[0] - 1)
            vy = npoly.polyvander(pts[:, 1], self.coef.shape[1] - 1)
            return np.sum((vx @ self.coef) * vy, axis=1)
        if self.n == 3:
            return npoly.polyval3d(pts[:, 0], pts[:, 1], pts[:, 2], self.coef)
        raise NotImplementedError("evaluation implemented for n <= 3")

    def _exponent(self, pts: np.ndarray) -> np.ndarray:
        return -np.sum((pts @ self.quad) * pts, axis=1) + pts @ self.lin + self.const

    def __call__(self, x):
        pts, shape = self._points(x)
        return (self._poly(pts) * np.exp(self._exponent(pts))).reshape(shape)

    def log_abs(self, x) -> np.ndarray:
        """``ln |f(x)|``, finite far beyond where ``f`` underflows."""
        pts, shape = self._points(x)
        with np.errstate(divide="ignore"):
            out = np.log(np.abs(self._poly(pts))) + self._exponent(pts).real
        return out.reshape(shape)

    def log_envelope(self, r) -> np.ndarray:
        """Upper bound for ``ln |f(x)|`` over ``|x| = r`` (Euclidean norm)."""
        r = np.asarray(r, dtype=float)
        idx = np.argwhere(self.coef != 0)
        if idx.size == 0:
            return np.full(r.shape, -np.inf)
        mags = np.abs(self.coef[tuple(idx.T)])
        degs = idx.sum(axis=1)
        poly = np.sum(mags[:, None] * r.reshape(1, -1) ** degs[:, None], axis=0).reshape(r.shape)
        lam = np.linalg.eigvalsh(self.quad.real).min()
        expo = -lam * r**2 + np.linalg.norm(self.lin.real) * r + self.const.real
        with np.errstate(divide="ignore"):
            return np.log(poly) + expo

    # --- algebra ------------------------------------------------------------

    def _replace(self, coef, label=None):
        return PolyGaussian(coef, self.quad, self.lin, self.const, label or self.label)

    def times_monomial(self, alpha) -> "PolyGaussian":
        alpha = _multi(alpha, self.n)
        coef = np.pad(self.coef, [(a, 0) for a in alpha])
        return self._replace(coef)

    def derivative(self, beta) -> "PolyGaussian":
        """Exact ``d^beta f`` via ``d_j (P e^q) = (d_j P + P d_j q) e^q``."""
        beta = _multi(beta, self.n)
        coef = self.coef
        for j, k in enumerate(beta):
            for _ in range(k):
                coef = _mul_linear(npoly.polyder(coef, axis=j) if coef.shape[j] > 1
                                   else np.zeros_like(coef), coef,
                                   -2.0 * self.quad[j], self.lin[j], j)
        return self._replace(coef)

    def seminorm_function(self, alpha, beta) -> "PolyGaussian":
        """``x^alpha d^beta f``."""
        return self.derivative(beta).times_monomial(alpha)

    def scaled(self, factor: complex) -> "PolyGaussian":
        return self._replace(self.coef * factor)

    def fourier(self) -> "PolyGaussian":
        r"""Closed-form ``\hat f(\xi) = \int f(x) e^{-2\pi i x \xi} dx`` (``n = 1``).

        The Gaussian factor transforms to another Gaussian; each power of
        ``x`` becomes the operator ``(i/2\pi) d/d\xi`` applied to it.
        """
        if self.n != 1:
            raise NotImplementedError("closed-form transform implemented for n = 1")
        a = self.quad[0, 0]
        b = self.lin[0]
        qa = np.pi**2 / a
        qb = -1j * np.pi * b / a
        qc = self.const + b * b / (4 * a) + 0.5 * np.log(np.pi / a)
        grad = np.array([qb, -2 * qa])  # d/dxi of the new exponent
        coef = np.zeros(1, dtype=complex)
        power = np.ones(1, dtype=complex)  # (i/2pi D)^m applied to 1
        for m, cm in enumerate(self.coef):
            if m > 0:
                power = (1j / (2 * np.pi)) * npoly.polyadd(npoly.polyder(power) if power.size > 1
                                                           else np.zeros(1), npoly.polymul(power, grad))
            if cm != 0:
                coef = npoly.polyadd(coef, cm * power)
        return PolyGaussian(np.atleast_1d(coef), [[qa]], [qb], qc, self.label + "^")


def _multi(idx, n):
    t = (int(idx),) if np.ndim(idx) == 0 else tuple(int(i) for i in idx)
    if len(t) != n or min(t) < 0:
        raise ValueError(f"multi-index {idx!r} invalid for n = {n}")
    return t


def _mul_linear(base, coef, row, offset, j):
    """``base + coef * (offset + sum_k row[k] x_k)`` as coefficient arrays."""
    n = coef.ndim
    shape = [max(base.shape[k], coef.shape[k] + 1) for k in range(n)]
    out = np.zeros(shape, dtype=complex)
    out[tuple(slice(0, s) for s in base.shape)] += base
    out[tuple(slice(0, s) for s in coef.shape)] += offset * coef
    for k in range(n):
        if row[k] != 0:
            sl = tuple(slice(1, coef.shape[i] + 1) if i == k else slice(0, coef.shape[i]) for i in range(n))
            out[sl] += row[k] * coef
    return out


# --- families -------------------------------------------------------------

def gaussian(a: float = math.pi, normalized: bool = True) -> PolyGaussian:
    """``e^{-a x^2}``, scaled to unit ``L^2`` norm when ``normalized``."""
    if not a > 0:
        raise ValueError("width a must be > 0")
    c = 0.25 * math.log(2 * a / math.pi) if normalized else 0.0
    return PolyGaussian([1.0], [[a]], [0.0], c, f"gaussian(a={a:g})")


def hermite(k: int, a: float = math.pi) -> PolyGaussian:
    """Unit-norm Hermite function ``H_k(sqrt(2a) x) e^{-a x^2}``.

    At ``a = pi`` this is the eigenfunction of the Fourier transform with
    eigenvalue ``(-i)^k``.
    """
    if k < 0:
        raise ValueError("Hermite index must be >= 0")
    if not a > 0:
        raise ValueError("width a must be > 0")
    mono = npherm.herm2poly(np.eye(k + 1)[k])
    mono = mono * math.sqrt(2 * a) ** np.arange(k + 1)
    norm = (2 * a / math.pi) ** 0.25 / math.sqrt(2.0**k * math.factorial(k))
    return PolyGaussian(mono * norm, [[a]], [0.0], 0.0, f"hermite(k={k},a={a:g})")


def modulated_translated(x0: float, w0: float, a: float = math.pi, normalized: bool = True) -> PolyGaussian:
    """``e^{2 pi i w0 x} e^{-a (x - x0)^2}``."""
    base = gaussian(a, normalized)
    lin = 2 * a * x0 + 2j * math.pi * w0
    return PolyGaussian([1.0], [[a]], [lin], base.const - a * x0 * x0,
                        f"modulated-translated(x0={x0:g},w0={w0:g},a={a:g})")


def linear_combination(weights, functions, label: str = "combination") -> PolyGaussian:
    """``sum_k w_k f_k`` for functions sharing one Gaussian exponent."""
    functions = list(functions)
    if not functions or len(functions) != len(weights):
        raise ValueError("need one weight per function")
    head = functions[0]
    for f in functions[1:]:
        if f.n != head.n or not (np.array_equal(f.quad, head.quad) and np.array_equal(f.lin, head.lin)):
            raise ValueError("functions must share the Gaussian exponent")
    size = [max(f.coef.shape[k] for f in functions) for k in range(head.n)]
    coef = np.zeros(size, dtype=complex)
    for w, f in zip(weights, functions):
        coef[tuple(slice(0, s) for s in f.coef.shape)] += w * f.coef * np.exp(f.const - head.const)
    return PolyGaussian(coef, head.quad, head.lin, head.const, label)


def tensor(*factors: PolyGaussian) -> PolyGaussian:
    """Product ``f1(x1) f2(x2) ...`` of functions of separate variables."""
    coef = np.ones([1] * 0, dtype=complex)
    quads, lins, const = [], [], 0.0
    for f in factors:
        coef = np.multiply.outer(coef, f.coef)
        quads.append(f.quad)
        lins.append(f.lin)
        const += f.const
    n = sum(q.shape[0] for q in quads)
    quad = np.zeros((n, n), dtype=complex)
    i = 0
    for q in quads:
        m = q.shape[0]
        quad[i:i + m, i:i + m] = q
        i += m
    return PolyGaussian(coef, quad, np.concatenate(lins), const,
                        " x ".join(f.label for f in factors))


# --- seminorms ------------------------------------------------------------

@dataclass(frozen=True)
class SupResult:
    value: float
    log_value: float
    argmax: tuple
    radius: float
    on_boundary: bool


def _certified_radius(f: PolyGaussian, log_peak: float, ratio: float) -> float:
    """Radius past which the envelope stays below ``ratio`` times the peak.

    Beyond ``R`` the log-envelope is falling (its polynomial part grows with
    log-slope at most ``deg/r`` while the Gaussian part falls with slope at
    least ``2 lam r - |Re b|``), so it suffices to check the value at ``R``.
    """
    lam = np.linalg.eigvalsh(f.quad.real).min()
    bnorm = np.linalg.norm(f.lin.real)
    deg = f.degree
    # smallest R with deg/R + |b| < 2 lam R
    r = (bnorm + math.sqrt(bnorm**2 + 8 * lam * deg)) / (4 * lam) + 1e-9
    r = max(r, 1.0 / math.sqrt(lam))
    target = log_peak + math.log(ratio)
    while f.log_envelope(r) > target:
        r *= 1.25
    return r


def seminorm_sup(f: PolyGaussian, alpha, beta, ratio: float = SUP_BOUNDARY_RATIO) -> SupResult:
    """``sup_x |x^alpha d^beta f(x)|`` by a log-spaced scan and local zoom refinement.

    The scan radius comes from the analytic envelope; ``on_boundary`` flags a
    maximum on the scan edge, which means the radius was too small.
    """
    g = f.seminorm_function(alpha, beta)
    if g.is_zero:
        return SupResult(0.0, -math.inf, (0.0,) * f.n, 0.0, False)
    n = f.n
    center = np.real(np.linalg.solve(2 * f.quad.real, f.lin.real))
    # rough peak estimate from a coarse scan, then a certified radius
    width = 1.0 / math.sqrt(np.linalg.eigvalsh(f.quad.real).min())
    r0 = _certified_radius(g, float(np.max(g.log_abs(_grid(center, width, n, 9)))), ratio)
    axes = [_scan_axis(r0, center[k], 200 if n == 1 else 30) for k in range(n)]
    pts = _mesh(axes)
    vals = g.log_abs(pts if n > 1 else pts[:, 0])
    peak = float(np.max(vals))
    r = _certified_radius(g, peak, ratio)
    if r > r0 * (1 + 1e-12):
        axes = [_scan_axis(r, center[k], 200 if n == 1 else 30) for k in range(n)]
        pts = _mesh(axes)
        vals = g.log_abs(pts if n > 1 else pts[:, 0])
    order = np.argsort(vals)[::-1]
    best_val, best_pt = -np.inf, None
    for i in order[: 3 if n == 1 else 1]:
        v, p = _zoom(g, pts[i], axes, m=11 if n == 1 else 21)
        if v > best_val:
            best_val, best_pt = v, p
    edge = bool(np.any(np.isclose(np.abs(best_pt), r, rtol=1e-9)))
    return SupResult(float(np.exp(best_val)), float(best_val), tuple(float(p) for p in best_pt), float(r), edge)


def _grid(center, width, n, m):
    axes = [np.linspace(c - 4 * width, c + 4 * width, m) for c in center]
    return _mesh(axes) if n > 1 else axes[0]


def _scan_axis(r, c, m):
    pos = np.logspace(math.log10(r) - 5, math.log10(r), m)
    pts = np.concatenate([-pos[::-1], [0.0], pos])
    if abs(c) > 0:
        # denser cover of the Gaussian centre when it sits off the origin
        pts = np.concatenate([pts, np.clip(c + np.linspace(-1, 1, 41) * min(r, 4.0), -r, r)])
    return np.unique(pts)


def _mesh(axes):
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))


def _zoom(g: PolyGaussian, pt, axes, steps: int = 30, m: int = 11):
    """Shrinking-box maximization of ``ln|g|`` around a scan point."""
    pt = np.asarray(pt, dtype=float)
    half = []
    for k, ax in enumerate(axes):
        i = int(np.searchsorted(ax, pt[k]))
        lo = ax[max(i - 1, 0)]
        hi = ax[min(i + 1, len(ax) - 1)]
        half.append(max(pt[k] - lo, hi - pt[k], 1e-300))
    half = np.array(half)
    lim = np.array([ax[-1] for ax in axes])
    best = float(g.log_abs(pt if g.n > 1 else pt[0]))
    for _ in range(steps):
        loc = [np.clip(pt[k] + np.linspace(-half[k], half[k], m), -lim[k], lim[k]) for k in range(g.n)]
        cand = _mesh(loc)
        vals = g.log_abs(cand if g.n > 1 else cand[:, 0])
        j = int(np.argmax(vals))
        if vals[j] >= best:
            best, pt = float(vals[j]), cand[j]
        half = half * (2.0 / (m - 1))
        if np.all(half <= 1e-13 * np.maximum(1.0, np.abs(pt))):
            break
    return best, pt


def seminorm_l2(f: PolyGaussian, alpha, beta, rtol: float = L2_TAIL_RTOL) -> float:
    """``||x^alpha d^beta f||_{L^2}`` by the trapezoid rule on a uniform grid.

    The half-width is grown until the analytic envelope bounds the tail mass
    below ``rtol`` of the total, and the step is halved until the result is
    stable to the same tolerance.
    """
    g = f.seminorm_function(alpha, beta)
    if g.is_zero:
        return 0.0
    n = g.n
    lam = np.linalg.eigvalsh(g.quad.real).min()
    center = np.real(np.linalg.solve(2 * g.quad.real, g.lin.real))
    r = _certified_radius(g, float(np.max(g.log_abs(_grid(center, 1 / math.sqrt(lam), n, 9)))), 1e-3)
    h = 0.25 / math.sqrt(lam * (1 + g.degree))
    prev = None
    for _ in range(40):
        val = _trapezoid_sq(g, r, h)
        # tail: 2 n-sphere shells beyond r where |g|^2 <= env(r)^2 e^{-lam (s^2 - r^2)}
        tail = math.exp(2 * float(g.log_envelope(r))) * (2 * r) ** (n - 1) * 2 * math.sqrt(math.pi / lam)
        if tail > rtol * val:
            r *= 1.25
            prev = None
            continue
        if prev is not None and abs(val - prev) <= rtol * val:
            return math.sqrt(val)
        prev = val
        h *= 0.5
    raise ArithmeticError("L2 quadrature did not settle; grid insufficient")


def _trapezoid_sq(g: PolyGaussian, r: float, h: float) -> float:
    m = int(math.ceil(r / h))
    ax = np.arange(-m, m + 1) * h
    if g.n == 1:
        return float(np.sum(np.exp(2 * g.log_abs(ax))) * h)
    pts = _mesh([ax] * g.n)
    return float(np.sum(np.exp(2 * g.log_abs(pts))) * h**g.n)


def _compositions(total: int, n: int):
    if n == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, n - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class SeminormTable:
    """Seminorms indexed by total orders ``A = |alpha|``, ``B = |beta|``, ``0 <= A, B <= K``.

    In several variables an entry is the maximum over all multi-indices with
    those totals. ``l2`` is ``None`` when only sup seminorms were computed.
    """

    function_id: str
    K: int
    sup: np.ndarray
    l2: np.ndarray | None = None
    boundary_flags: int = 0
    radius_max: float = 0.0

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["alpha", "beta", "sup", "l2"])
        for a in range(self.K + 1):
            for b in range(self.K + 1):
                w.writerow([a, b, f"{self.sup[a, b]:.17g}",
                            "" if self.l2 is None else f"{self.l2[a, b]:.17g}"])
        return buf.getvalue()


def seminorm_table(f: PolyGaussian, K: int, include_l2: bool = True, rows=None) -> SeminormTable:
    """Populate the table; ``rows`` restricts which ``A`` values are filled (others are NaN)."""
    sup = np.full((K + 1, K + 1), np.nan)
    l2 = np.full((K + 1, K + 1), np.nan) if include_l2 else None
    flags, rmax = 0, 0.0
    rows = range(K + 1) if rows is None else rows
    for A in rows:
        for B in range(K + 1):
            s_best, l_best = 0.0, 0.0
            for al in _compositions(A, f.n):
                for be in _compositions(B, f.n):
                    res = seminorm_sup(f, al, be)
                    flags += res.on_boundary
                    rmax = max(rmax, res.radius)
                    s_best = max(s_best, res.value)
                    if include_l2:
                        l_best = max(l_best, seminorm_l2(f, al, be))
            sup[A, B] = s_best
            if include_l2:
                l2[A, B] = l_best
    return SeminormTable(f.label, K, sup, l2, flags, rmax)


# --- fitting --------------------------------------------------------------

def _plus_log_power(p: np.ndarray, sigma: float) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(p > 1, p**sigma * np.log(np.maximum(p, 1.0)), 0.0)


@dataclass(frozen=True)
class TauFit:
    """``ln s <= ln C + tau * den`` on every entry; ``tau`` minimal for this ``C``."""

    tau: float
    log_c: float
    argmax: tuple | None

    def bound(self, den):
        return self.log_c + self.tau * np.asarray(den)


def fit_entries(values, den, log_c: float | None = None) -> TauFit:
    """Max-ratio fit of ``tau`` for entries ``values`` with exponents ``den``.

    Entries with ``den == 0`` carry no information about ``tau`` and set
    ``C = max(1, their maximum)`` unless ``log_c`` is given.
    """
    values = np.asarray(values, dtype=float)
    den = np.asarray(den, dtype=float)
    ok = ~np.isnan(values)
    with np.errstate(divide="ignore"):
        logs = np.log(values)
    free = ok & (den == 0)
    if log_c is None:
        log_c = max(0.0, float(np.max(logs[free]))) if np.any(free) else 0.0
    live = ok & (den > 0)
    if not np.any(live):
        return TauFit(0.0, log_c, None)
    ratios = np.full(values.shape, -np.inf)
    ratios[live] = (logs[live] - log_c) / den[live]
    k = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
    tau = max(0.0, float(ratios[k]))
    return TauFit(tau, log_c, tuple(int(i) for i in k))


def product_index(K: int, sigma: float) -> np.ndarray:
    """``A^sigma ln+ A + B^sigma ln+ B`` for ``0 <= A, B <= K``."""
    d = _plus_log_power(np.arange(K + 1), sigma)
    return d[:, None] + d[None, :]


def sum_index(K: int, sigma: float) -> np.ndarray:
    """``(A + B)^sigma ln+ (A + B)``."""
    a = np.arange(K + 1)
    return _plus_log_power(a[:, None] + a[None, :], sigma)


def fit_tau(table: SeminormTable, sigma: float, log_c: float | None = None, which: str = "sup") -> TauFit:
    """Fit ``sup |x^alpha d^beta f| <= C M_|alpha| M_|beta|`` on a table."""
    if table.K < 4:
        raise ValueError("fit needs K >= 4")
    if not sigma > 1:
        raise ValueError("sigma must be > 1")
    vals = table.sup if which == "sup" else table.l2
    if vals is None:
        raise ValueError("table has no L2 entries")
    return fit_entries(vals, product_index(table.K, sigma), log_c)


def inflated_constant(values, den, tau: float) -> float:
    """Smallest ``ln C`` making ``ln s <= ln C + tau den`` hold on every entry."""
    values = np.asarray(values, dtype=float)
    with np.errstate(divide="ignore"):
        logs = np.log(values)
    ok = ~np.isnan(values)
    return float(np.max(logs[ok] - tau * np.asarray(den)[ok]))


@dataclass(frozen=True)
class DecayCheck:
    """``sup_x |phi(x)| exp T_tau(|x|)`` over a scan."""

    tau: float
    log_sup: float
    argmax: float
    finite: bool


def _decay_check(f: PolyGaussian, tau: float, sigma: float, m: int = 600) -> DecayCheck:
    if f.is_zero:
        return DecayCheck(tau, -math.inf, 0.0, True)
    params = WeightParams(tau, sigma)
    lam = float(f.quad.real[0, 0])
    c = float(f.lin.real[0]) / (2 * lam)
    # grow the range until the combined log decays below the running max at both ends
    r = abs(c) + 4.0 / math.sqrt(lam)
    while True:
        x = np.concatenate([np.linspace(-r, r, m), [c]])
        T = np.zeros_like(x)
        nz = np.abs(x) > 0
        T[nz] = associated_values(np.abs(x[nz]), params)[0]
        vals = f.log_abs(x) + T
        k = int(np.argmax(vals))
        edge = max(vals[0], vals[m - 1])
        if edge < vals[k] - 30 and 0 < k < m - 1 or k == m:
            return DecayCheck(tau, float(vals[k]), float(x[k]), bool(np.isfinite(vals[k])))
        r *= 1.5
        if r > 1e6:
            return DecayCheck(tau, float(vals[k]), float(x[k]), False)


@dataclass(frozen=True)
class MembershipReport:
    """Fitted membership parameters for one function at one ``sigma``.

    ``joint``, ``decay``, ``deriv`` and ``fourier`` are the four equivalent
    condition sets; ``l2`` fits the ``L^2`` table. ``inflation_*`` are the
    constants showing one condition set certifies another once ``tau`` is
    inflated by ``2^sigma``.
    """

    function_id: str
    sigma: float
    K: int
    joint: TauFit
    decay: TauFit
    deriv: TauFit
    fourier: TauFit | None
    l2: TauFit | None
    sum_fit: TauFit
    inflation_joint_log_c: float
    cross_sup_from_l2_log_c: float | None
    cross_l2_from_sup_log_c: float | None
    sum_product_consistent: bool
    decay_checks: tuple = field(default_factory=tuple)
    fourier_decay_checks: tuple = field(default_factory=tuple)
    beurling_taus: tuple = field(default_factory=tuple)

    @property
    def finite(self) -> bool:
        fits = [self.joint, self.decay, self.deriv] + [t for t in (self.fourier, self.l2) if t]
        return all(math.isfinite(t.tau) for t in fits)

    @property
    def corollary_finite(self) -> bool:
        return all(d.finite for d in self.decay_checks + self.fourier_decay_checks)


def membership_report(table: SeminormTable, sigma: float, fourier_row=None, decay_checks=(),
                      fourier_decay_checks=(), beurling_taus=()) -> MembershipReport:
    """Assemble every fit from a populated table (and optionally the transform's decay row)."""
    K = table.K
    if K < 4:
        raise ValueError("fit needs K >= 4")
    den = product_index(K, sigma)
    d1 = _plus_log_power(np.arange(K + 1), sigma)
    joint = fit_entries(table.sup, den)
    decay = fit_entries(table.sup[:, 0], d1)
    deriv = fit_entries(table.sup[0, :], d1)
    fourier = fit_entries(fourier_row, d1) if fourier_row is not None else None
    infl = 2.0**sigma * max(decay.tau, deriv.tau)
    infl_c = inflated_constant(table.sup, den, infl)

    l2 = cross_a = cross_b = None
    if table.l2 is not None:
        l2 = fit_entries(table.l2, den)
        cross_a = inflated_constant(table.sup, den, 2.0**sigma * l2.tau)
        cross_b = inflated_constant(table.l2, den, 2.0**sigma * joint.tau)

    sden = sum_index(K, sigma)
    sfit = fit_entries(table.sup, sden)
    consistent = _sum_product_consistent(table.sup, joint, sfit, K, sigma)
    return MembershipReport(table.function_id, sigma, K, joint, decay, deriv, fourier, l2, sfit,
                            infl_c, cross_a, cross_b, consistent, tuple(decay_checks),
                            tuple(fourier_decay_checks), tuple(beurling_taus))


def _sum_product_consistent(sup, joint: TauFit, sfit: TauFit, K: int, sigma: float) -> bool:
    """Each index form certifies the other through (M.1) and ~(M.2).

    Product form implies the sum form with the same ``tau`` since
    ``M_p M_q <= M_{p+q}``; the sum form gives the product form at
    ``2^{sigma-1} tau`` with the extra ~(M.2) constant.
    """
    with np.errstate(divide="ignore"):
        logs = np.log(sup)
    slack = 1e-9
    ok = ~np.isnan(sup)
    a = np.arange(K + 1)
    if joint.tau > 0:
        lm = LogWeightTable.build(WeightParams(joint.tau, sigma), 2 * K).logM
        if not np.all(logs[ok] <= joint.log_c + lm[a[:, None] + a[None, :]][ok] + slack):
            return False
    if sfit.tau > 0:
        cond = check_conditions(WeightParams(sfit.tau, sigma), pmax=max(2 * K, 8))
        lm2 = LogWeightTable.build(WeightParams(2.0 ** (sigma - 1) * sfit.tau, sigma), K).logM
        rhs = sfit.log_c + cond.m2_log_c + lm2[:, None] + lm2[None, :]
        if not np.all(logs[ok] <= rhs[ok] + slack):
            return False
    return True


def characterize(f: PolyGaussian, sigma: float, K: int = 12, beurling_steps: int = 4,
                 include_l2: bool = True) -> MembershipReport:
    """All four condition sets, the ``L^2`` cross-check and the decay corollaries for ``f``.

    The decay sups are evaluated at ``tau = max(tau_decay, tau_fourier) / 2^sigma``
    (or at 1 when both fits vanish); the Beurling variant repeats them along
    ``tau / 2^j``.
    """
    if f.n != 1:
        raise NotImplementedError("characterize needs a one-variable function")
    table = seminorm_table(f, K, include_l2=include_l2)
    fhat = f.fourier()
    frow = np.array([seminorm_sup(fhat, A, 0).value for A in range(K + 1)])
    base = membership_report(table, sigma, frow)
    t0 = max(base.decay.tau, base.fourier.tau) / 2.0**sigma
    if t0 <= 0:
        t0 = 1.0
    taus = tuple(t0 / 2.0**j for j in range(beurling_steps + 1))
    dchk = tuple(_decay_check(f, t, sigma) for t in taus)
    fchk = tuple(_decay_check(fhat, t, sigma) for t in taus)
    return membership_report(table, sigma, frow, dchk, fchk, taus)
