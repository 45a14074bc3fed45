r"""Time-frequency representations on a uniform lattice.

Every transform is reduced to one quadrature pattern per phase-space row,
``P(x, w) * k * step * sum_j u_x(s_j) exp(2 pi i lam w s_j)``, where the
row integrand ``u_x``, the frequency scale ``lam``, the prefactor ``P`` and
the weight ``k`` depend on the kind. Reference mode sums that directly.
Fast mode reads the centred DFT of ``u_x`` at ``-lam w``.

Signals are either sampled (``SampledSignal``, zero outside the window) or
analytic (:class:`~extgev.testfn.PolyGaussian`, evaluated anywhere).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .parallel import map_rows
from .testfn import MembershipReport, PolyGaussian, membership_report, seminorm_table

KINDS = ("grossmann-royer", "stft", "wigner", "ambiguity")
DEFAULT_HALF_WIDTH = 8.0
DEFAULT_COUNT = 256
_LATTICE_RTOL = 1e-9


class LatticeError(ValueError):
    """A requested point is not on the sample lattice the evaluator needs."""


@dataclass(frozen=True)
class Axis:
    """Points ``center + (j - count/2) step`` for ``j = 0 .. count-1``."""

    center: float
    step: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.center) and math.isfinite(self.step)):
            raise ValueError("axis center and step must be finite")
        if not self.step > 0:
            raise ValueError(f"axis step must be > 0, got {self.step}")
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"axis count must be a positive integer, got {self.count}")
        object.__setattr__(self, "count", int(self.count))

    @classmethod
    def symmetric(cls, half_width: float = DEFAULT_HALF_WIDTH, count: int = DEFAULT_COUNT) -> "Axis":
        """``[-L, L)`` with ``count`` points."""
        return cls(0.0, 2.0 * half_width / count, count)

    @property
    def points(self) -> np.ndarray:
        return self.center + (np.arange(self.count) - self.count // 2) * self.step

    def index_of(self, pts) -> np.ndarray:
        """Fractional lattice index of each point."""
        return (np.asarray(pts, dtype=float) - self.center) / self.step + self.count // 2


@dataclass(frozen=True)
class SampledSignal:
    """Samples ``f(center + (j - N/2) step)``; ``N`` even."""

    axis: Axis
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex).reshape(-1)
        if self.axis.count % 2:
            raise ValueError("sample count must be even")
        if vals.size != self.axis.count:
            raise ValueError(f"expected {self.axis.count} samples, got {vals.size}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, f: Callable, axis: Axis) -> "SampledSignal":
        return cls(axis, f(axis.points))

    @property
    def n(self) -> int:
        return 1

    def norm(self) -> float:
        return math.sqrt(self.axis.step * float(np.sum(np.abs(self.values) ** 2)))

    def inner(self, other: "SampledSignal") -> complex:
        """``<self, other> = step * sum self * conj(other)`` on a shared axis."""
        _require_shared(self, other)
        return complex(self.axis.step * np.sum(self.values * np.conj(other.values)))

    def at(self, pts) -> np.ndarray:
        """Values at lattice points; zero outside the window."""
        pts = np.asarray(pts, dtype=float)
        idx = self.axis.index_of(pts)
        k = np.rint(idx)
        if np.any(np.abs(idx - k) > _LATTICE_RTOL * np.maximum(1.0, np.abs(idx))):
            raise LatticeError("points are off the sample lattice")
        k = k.astype(np.int64)
        inside = (k >= 0) & (k < self.axis.count)
        out = np.zeros(pts.shape, dtype=complex)
        out[inside] = self.values[k[inside]]
        return out


Signal = Union[SampledSignal, PolyGaussian]


def _require_shared(a: SampledSignal, b: SampledSignal) -> None:
    if a.axis != b.axis:
        raise ValueError("signals must share one sample axis")


# --- Fourier transform ------------------------------------------------------

def _centered_dft(v: np.ndarray, sign: int) -> np.ndarray:
    """``sum_j v_j exp(sign 2 pi i (j - N/2)(k - N/2) / N)`` for every ``k``."""
    shifted = np.fft.ifftshift(v)
    out = np.fft.fft(shifted) if sign < 0 else np.fft.ifft(shifted) * v.size
    return np.fft.fftshift(out)


def fourier(f: SampledSignal, freq_center: float = 0.0) -> SampledSignal:
    r"""Samples of ``\hat f(\xi) = \int f(x) e^{-2 pi i x xi} dx`` via the DFT.

    The output axis has step ``1/(N step)`` and the given centre.
    """
    ax = f.axis
    n = ax.count
    u = (np.arange(n) - n // 2) * ax.step
    out_ax = Axis(freq_center, 1.0 / (n * ax.step), n)
    xi = out_ax.points
    vals = ax.step * np.exp(-2j * np.pi * ax.center * xi) * _centered_dft(
        f.values * np.exp(-2j * np.pi * u * freq_center), -1)
    return SampledSignal(out_ax, vals)


def inverse_fourier(F: SampledSignal, center: float = 0.0) -> SampledSignal:
    r"""Samples of ``\int F(xi) e^{2 pi i x xi} d xi`` on an axis centred at ``center``."""
    ax = F.axis
    n = ax.count
    v = (np.arange(n) - n // 2) * ax.step
    out_ax = Axis(center, 1.0 / (n * ax.step), n)
    u = (np.arange(n) - n // 2) * out_ax.step
    vals = ax.step * np.exp(2j * np.pi * (center * ax.center + u * ax.center)) * _centered_dft(
        F.values * np.exp(2j * np.pi * v * center), +1)
    return SampledSignal(out_ax, vals)


# --- time-frequency representations ---------------------------------------

@dataclass(frozen=True)
class PhaseSpaceGrid:
    x: Axis
    w: Axis

    @classmethod
    def from_points(cls, xs, ws) -> "PhaseSpaceGrid":
        """Grid from two uniformly spaced point lists."""
        return cls(_axis_from_points(xs), _axis_from_points(ws))

    @classmethod
    def fast_default(cls, quad: Axis, kind: str = "grossmann-royer") -> "PhaseSpaceGrid":
        """x on the lattice the sampled evaluator needs, w on the DFT lattice of ``kind``."""
        lam = _freq_scale(kind)
        n = quad.count
        xstep = quad.step / 2 if kind == "grossmann-royer" else quad.step
        xcount = 2 * n if kind == "grossmann-royer" else n
        wstep = 1.0 / (n * quad.step * abs(lam))
        # w = -xi / lam mirrors the DFT lattice when lam > 0
        return cls(Axis(quad.center, xstep, xcount), Axis(wstep if lam > 0 else 0.0, wstep, n))


def _axis_from_points(pts) -> Axis:
    pts = np.asarray(pts, dtype=float)
    if pts.size == 1:
        return Axis(float(pts[0]), 1.0, 1)
    step = (pts[-1] - pts[0]) / (pts.size - 1)
    if not np.allclose(np.diff(pts), step, rtol=1e-9, atol=0):
        raise ValueError("grid points must be uniformly spaced")
    return Axis(float(pts[pts.size // 2]), float(step), pts.size)


@dataclass(frozen=True)
class TFRResult:
    kind: str
    grid: PhaseSpaceGrid
    values: np.ndarray = field(repr=False)  # shape (x count, w count)
    quadrature: dict = field(default_factory=dict)


def _freq_scale(kind: str) -> float:
    return {"grossmann-royer": 2.0, "stft": -1.0, "wigner": -2.0, "ambiguity": -1.0}[kind]


def _evaluator(sig: Signal) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(sig, SampledSignal):
        return sig.at
    if isinstance(sig, PolyGaussian):
        if sig.n != 1:
            raise ValueError("signals are functions of one variable")
        return lambda t: sig(np.asarray(t, dtype=float))
    raise TypeError(f"unsupported signal type {type(sig).__name__}")


def _quad_axis(f: Signal, g: Signal, quad: Axis | None) -> tuple[Axis, bool]:
    sampled = [s for s in (f, g) if isinstance(s, SampledSignal)]
    if sampled:
        if len(sampled) == 2:
            _require_shared(f, g)
        ax = sampled[0].axis
        if quad is not None and quad != ax:
            raise ValueError("sampled signals fix the quadrature axis")
        return ax, True
    return (quad if quad is not None else Axis.symmetric()), False


def _row_pattern(kind: str, f, g, x: float, ax: Axis, sampled: bool):
    """Row integrand on the quadrature lattice, its prefactor and weight."""
    fe, ge = _evaluator(f), _evaluator(g)
    s = ax.points
    if kind == "grossmann-royer":
        u = fe(2 * x - s) * np.conj(ge(s))
        return s, u, (lambda w: np.exp(-4j * np.pi * w * x)), 1.0
    if kind == "stft":
        u = fe(s) * np.conj(ge(s - x))
        return s, u, (lambda w: np.ones_like(w, dtype=complex)), 1.0
    if kind == "wigner":
        # defining integral on the lag lattice t = 2 s
        lag = (np.arange(ax.count) - ax.count // 2) * ax.step
        u = fe(x + lag) * np.conj(ge(x - lag))
        return lag, u, (lambda w: np.ones_like(w, dtype=complex)), 2.0
    if kind == "ambiguity":
        if sampled:
            # t = s + x/2 keeps every argument on the sample lattice
            u = fe(s + x) * np.conj(ge(s))
            return s, u, (lambda w: np.exp(-1j * np.pi * w * x)), 1.0
        u = fe(s + x / 2) * np.conj(ge(s - x / 2))
        return s, u, (lambda w: np.ones_like(w, dtype=complex)), 1.0
    raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")


def _check_x_lattice(kind: str, xs: np.ndarray, ax: Axis) -> None:
    # which multiple of x must land on the sample lattice
    if kind == "grossmann-royer":
        probe = 2 * (xs - ax.center) / ax.step
    elif kind == "wigner":
        probe = (xs - ax.center) / ax.step
    else:
        probe = xs / ax.step
    if np.any(np.abs(probe - np.rint(probe)) > _LATTICE_RTOL * np.maximum(1.0, np.abs(probe))):
        raise LatticeError(f"x grid is not aligned with the sample lattice required by {kind}")


def _fast_indices(ws: np.ndarray, lam: float, s: np.ndarray, step: float) -> np.ndarray:
    n = s.size
    idx = (-lam * ws) * n * step + n // 2
    k = np.rint(idx)
    if np.any(np.abs(idx - k) > _LATTICE_RTOL * np.maximum(1.0, np.abs(idx))):
        raise LatticeError("frequency grid is not on the transform lattice of fast mode")
    if np.any((k < 0) | (k >= n)):
        raise ValueError("frequency grid exceeds the range representable by fast mode")
    return k.astype(np.int64)


def tfr(kind: str, f: Signal, g: Signal, grid: PhaseSpaceGrid, mode: str = "reference",
        quad: Axis | None = None) -> TFRResult:
    """Evaluate one of :data:`KINDS` on ``grid``.

    Parameters
    ----------
    mode : {"reference", "fast"}
        Direct summation of the quadrature, or one DFT per x-row read on the
        transform lattice.
    quad : Axis, optional
        Quadrature lattice for analytic signals (default ``[-8, 8)``, 256
        points); sampled signals bring their own.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")
    if mode not in ("reference", "fast"):
        raise ValueError("mode must be 'reference' or 'fast'")
    ax, sampled = _quad_axis(f, g, quad)
    xs, ws = grid.x.points, grid.w.points
    lam = _freq_scale(kind)
    if sampled:
        _check_x_lattice(kind, xs, ax)
    kidx = None
    if mode == "fast":
        s0 = (np.arange(ax.count) - ax.count // 2) * ax.step
        kidx = _fast_indices(ws, lam, s0, ax.step)

    def row(x):
        s, u, pref, weight = _row_pattern(kind, f, g, float(x), ax, sampled)
        if mode == "reference":
            sums = ax.step * (np.exp(2j * np.pi * lam * np.outer(ws, s)) @ u)
        else:
            # centre the integrand lattice at 0; the offset becomes a phase
            c = s[ax.count // 2]
            spectrum = fourier(SampledSignal(Axis(0.0, ax.step, ax.count), u))
            sums = spectrum.values[kidx] * np.exp(2j * np.pi * lam * ws * c)
        return weight * pref(ws) * sums

    vals = np.array(map_rows(row, xs))
    meta = {"step": ax.step, "count": ax.count, "center": ax.center,
            "evaluator": "sampled" if sampled else "analytic", "mode": mode}
    return TFRResult(kind, grid, vals, meta)


def grossmann_royer(f: Signal, g: Signal, grid: PhaseSpaceGrid, mode: str = "reference", quad=None) -> TFRResult:
    r"""``R_g f(x, w) = \int e^{4 pi i w (t - x)} f(2x - t) conj(g(t)) dt``."""
    return tfr("grossmann-royer", f, g, grid, mode, quad)


def stft(f: Signal, g: Signal, grid: PhaseSpaceGrid, mode: str = "reference", quad=None) -> TFRResult:
    r"""``V_g f(x, w) = \int e^{-2 pi i t w} f(t) conj(g(t - x)) dt``."""
    return tfr("stft", f, g, grid, mode, quad)


def wigner(f: Signal, g: Signal, grid: PhaseSpaceGrid, mode: str = "reference", quad=None) -> TFRResult:
    r"""``W(f, g)(x, w) = \int e^{-2 pi i w t} f(x + t/2) conj(g(x - t/2)) dt``."""
    return tfr("wigner", f, g, grid, mode, quad)


def ambiguity(f: Signal, g: Signal, grid: PhaseSpaceGrid, mode: str = "reference", quad=None) -> TFRResult:
    r"""``A(f, g)(x, w) = \int e^{-2 pi i w t} f(t + x/2) conj(g(t - x/2)) dt``."""
    return tfr("ambiguity", f, g, grid, mode, quad)


# --- identities -------------------------------------------------------------

def _sampled(sig: Signal, ax: Axis) -> SampledSignal:
    return sig if isinstance(sig, SampledSignal) else SampledSignal.from_function(sig, ax)


def moyal_constant(n: int = 1) -> float:
    """``<R_{g1} f1, R_{g2} f2> = moyal_constant(n) <f1, f2> conj(<g1, g2>)``.

    ``R_g f = 2^{-n} W(f, g)`` and the cross-Wigner transform is unitary, so
    the constant is ``4^{-n}``.
    """
    return 4.0**-n


@dataclass(frozen=True)
class MoyalResult:
    lhs: complex
    rhs: complex
    rel_err: float
    scale: float  # denominator of rel_err
    tail_mass: float


def _tail_mass(sig: SampledSignal) -> float:
    """Fraction of ``||f||^2`` carried by the outer sixteenth at each end."""
    n = sig.axis.count
    e = np.abs(sig.values) ** 2
    tot = float(np.sum(e))
    if tot == 0:
        return 0.0
    m = max(1, n // 16)
    return float(np.sum(e[:m]) + np.sum(e[-m:])) / tot


def moyal_check(f1: Signal, g1: Signal, f2: Signal, g2: Signal, quad: Axis | None = None,
                tail_tol: float = 1e-12) -> MoyalResult:
    """Both sides of the Moyal identity for the Grossmann-Royer transform.

    The left side is a 2-d quadrature over the full fast-mode phase-space
    lattice; the right side uses 1-d quadratures. The error is relative to
    ``|rhs|``, or to ``4^{-n} ||f1|| ||f2|| ||g1|| ||g2||`` when the inner
    products nearly cancel.
    """
    ax = quad or next((s.axis for s in (f1, g1, f2, g2) if isinstance(s, SampledSignal)), Axis.symmetric())
    sigs = [_sampled(s, ax) for s in (f1, g1, f2, g2)]
    tails = [_tail_mass(s) for s in sigs]
    if max(tails) >= tail_tol:
        raise ValueError(f"signal not contained in the window (tail mass {max(tails):.3e})")
    s1, h1, s2, h2 = sigs
    grid = PhaseSpaceGrid.fast_default(ax)
    r1 = grossmann_royer(s1, h1, grid, "fast").values
    r2 = grossmann_royer(s2, h2, grid, "fast").values
    lhs = complex(np.sum(r1 * np.conj(r2)) * grid.x.step * grid.w.step)
    c = moyal_constant(1)
    rhs = c * s1.inner(s2) * np.conj(h1.inner(h2))
    norms = c * s1.norm() * s2.norm() * h1.norm() * h2.norm()
    scale = abs(rhs) if abs(rhs) > 1e-8 * norms else norms
    return MoyalResult(lhs, complex(rhs), abs(lhs - rhs) / scale if scale else abs(lhs), scale, max(tails))


def invert(R: TFRResult, g1: Signal, g2: Signal) -> SampledSignal:
    r"""Reconstruct ``f`` from ``R = R_{g1} f`` sampled on a fast-mode lattice.

    ``f(t) = 4^n / <g2, g1> \iint R_{g1} f(x, w) e^{4 pi i w (t - x)} g2(2x - t) dx dw``
    by 2-d quadrature over the grid of ``R``, on the sample lattice.
    """
    if R.kind != "grossmann-royer":
        raise ValueError("inversion needs a Grossmann-Royer transform")
    ax = Axis(R.quadrature["center"], R.quadrature["step"], R.quadrature["count"])
    s1, s2 = _sampled(g1, ax), _sampled(g2, ax)
    ip = s2.inner(s1)
    if abs(ip) <= 1e-8 * s1.norm() * s2.norm():
        raise ValueError("window pair is (nearly) orthogonal; inversion undefined")
    t = ax.points
    xs, ws = R.grid.x.points, R.grid.w.points
    ge = _evaluator(g2)
    dxdw = R.grid.x.step * R.grid.w.step

    # e^{4 pi i w (t - x)} splits into a shared t-factor and a per-row x-factor
    phase_t = np.exp(4j * np.pi * np.outer(t, ws))

    def row(i):
        x = xs[i]
        inner = phase_t @ (R.values[i] * np.exp(-4j * np.pi * x * ws))
        return inner * ge(2 * x - t)

    acc = np.sum(np.array(map_rows(row, range(xs.size))), axis=0)
    return SampledSignal(ax, acc * dxdw / (moyal_constant(1) * ip))


def reflect(f: PolyGaussian) -> PolyGaussian:
    """``f(-x)``."""
    if f.n != 1:
        raise ValueError("reflection implemented for one variable")
    sign = (-1.0) ** np.arange(f.coef.size)
    return PolyGaussian(f.coef * sign, f.quad, -f.lin, f.const, f.label + "(-x)")


@dataclass(frozen=True)
class SymmetryReport:
    conjugate_swap: float     # max |R_g f - conj(R_f g)|
    fourier_rotation: float   # max |R_{g^} f^(x, w) - R_g f(-w, x)|
    translate_modulate: float # max |direct - operator pipeline|


def _translate_modulate(f: PolyGaussian, g: PolyGaussian, grid: PhaseSpaceGrid, quad: Axis) -> np.ndarray:
    """``e^{-4 pi i w x} <M_{2w} T_{2x} (f reflected), g>`` by 1-d quadrature."""
    t = quad.points
    fr = reflect(f)
    out = np.empty((grid.x.count, grid.w.count), dtype=complex)
    gt = np.conj(g(t))
    for i, x in enumerate(grid.x.points):
        shifted = fr(t - 2 * x)  # T_{2x} of the reflection
        for j, w in enumerate(grid.w.points):
            mod = np.exp(2j * np.pi * (2 * w) * t) * shifted
            out[i, j] = np.exp(-4j * np.pi * w * x) * quad.step * np.sum(mod * gt)
    return out


def symmetry_checks(f: PolyGaussian, g: PolyGaussian, grid: PhaseSpaceGrid,
                    quad: Axis | None = None) -> SymmetryReport:
    quad = quad or Axis.symmetric()
    r = grossmann_royer(f, g, grid, quad=quad).values
    r_swap = grossmann_royer(g, f, grid, quad=quad).values
    if not np.allclose(grid.w.points, -grid.w.points[::-1], rtol=0, atol=1e-12):
        raise ValueError("the rotation check needs a w axis symmetric about 0")
    lhs = grossmann_royer(f.fourier(), g.fourier(), grid, quad=quad).values
    # q[a, b] = R_g f(w_a, x_b); the rotation wants R_g f(-w_j, x_i)
    q = grossmann_royer(f, g, PhaseSpaceGrid(grid.w, grid.x), quad=quad).values
    rhs = q[::-1, :].T
    tm = _translate_modulate(f, g, grid, quad)
    return SymmetryReport(
        float(np.max(np.abs(r - np.conj(r_swap)))),
        float(np.max(np.abs(lhs - rhs))),
        float(np.max(np.abs(r - tm))),
    )


@dataclass(frozen=True)
class LemmaReport:
    wigner_vs_gr: float  # max |W - 2^n R|
    stft_vs_gr: float    # max |V - e^{-pi i x w} R_{g reflected} f(x/2, w/2)|
    ambiguity_vs_gr: float
    property1_ratio: float  # max |R| / (||f|| ||g||)


def lemma_checks(f: PolyGaussian, g: PolyGaussian, grid: PhaseSpaceGrid, quad: Axis | None = None) -> LemmaReport:
    """Pointwise relations between the four transforms, with analytic evaluators."""
    quad = quad or Axis.symmetric()
    r = grossmann_royer(f, g, grid, quad=quad).values
    w = wigner(f, g, grid, quad=quad).values
    v = stft(f, g, grid, quad=quad).values
    a = ambiguity(f, g, grid, quad=quad).values
    half = PhaseSpaceGrid(Axis(grid.x.center / 2, grid.x.step / 2, grid.x.count),
                          Axis(grid.w.center / 2, grid.w.step / 2, grid.w.count))
    rr = grossmann_royer(f, reflect(g), half, quad=quad).values
    X, Wm = np.meshgrid(grid.x.points, grid.w.points, indexing="ij")
    fs, gs = _sampled(f, quad), _sampled(g, quad)
    return LemmaReport(
        float(np.max(np.abs(w - 2.0 * r))),
        float(np.max(np.abs(v - np.exp(-1j * np.pi * X * Wm) * rr))),
        float(np.max(np.abs(a - rr))),
        float(np.max(np.abs(r)) / (fs.norm() * gs.norm())),
    )


# --- closed form and membership -----------------------------------------------

def grossmann_royer_closed_form(f: PolyGaussian, g: PolyGaussian) -> PolyGaussian:
    r"""Exact ``R_g f`` for Gaussian-type ``f, g`` as a function of ``(x, w)``.

    With ``f = c_f e^{-a s^2 + b s + d}`` and ``g`` alike, the ``t``-integral is
    a complex Gaussian integral; completing the square leaves
    ``C exp(-z^T M z + beta.z + gamma)`` in ``z = (x, w)``.
    """
    for s in (f, g):
        if s.n != 1 or s.degree != 0:
            raise ValueError("closed form needs Gaussian-type signals (constant polynomial factor)")
    af, bf, df = f.quad[0, 0], f.lin[0], f.const
    ag, bg, dg = np.conj(g.quad[0, 0]), np.conj(g.lin[0]), np.conj(g.const)
    A = af + ag
    # t-linear coefficient B0 + Bx x + Bw w
    B0, Bx, Bw = bg - bf, 4 * af, 4j * np.pi
    Mxx = 4 * af - Bx * Bx / (4 * A)
    Mww = -Bw * Bw / (4 * A)
    Mxw = -(Bx * Bw / (2 * A) - 4j * np.pi) / 2
    lin = np.array([B0 * Bx / (2 * A) + 2 * bf, B0 * Bw / (2 * A)])
    const = B0 * B0 / (4 * A) + df + dg
    coef = np.array([[f.coef[0] * np.conj(g.coef[0]) * np.sqrt(np.pi / A)]])
    return PolyGaussian(coef, [[Mxx, Mxw], [Mxw, Mww]], lin, const, f"R[{g.label}]{f.label}")


def tfr_membership(f: PolyGaussian, g: PolyGaussian, sigma: float, K: int = 6) -> MembershipReport:
    """Fit membership parameters for ``R_g f`` from its closed form in ``(x, w)``."""
    R = grossmann_royer_closed_form(f, g)
    table = seminorm_table(R, K, include_l2=False)
    return membership_report(table, sigma)
