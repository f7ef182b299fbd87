"""Carathéodory metric, distance and extremal problem on G.

Some Phi_omega (omega on T) always solves the extremal problem, so the metric
is the maximum over the circle of the Poincaré length of (Phi_omega)_* delta.
The set of maximizing omega has one point, two points, or is all of T.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import magic
from .functions import GFunction, SchurViolation, mobius_after
from .gdomain import DiskTangent, SymPoint, Tangent, poincare_distance, poincare_metric, sample_G, unsymmetrize
from .mobius import MobiusMap, aligning_map

__all__ = [
    "ClassificationError",
    "ExtremalSet",
    "ExtremalityReport",
    "NotExtremalError",
    "TangentClass",
    "Tolerances",
    "TrichotomyError",
    "align",
    "classify",
    "distance",
    "extremal_set",
    "metric",
    "profile_grid",
    "push_general",
    "verify_extremal",
]

TWO_PI = 2 * math.pi
INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class Tolerances:
    grid: int = 4096
    theta: float = 1e-12
    constancy: float = 1e-10
    cluster: float = 1e-7
    angle: float = 1e-6
    extremality: float = 1e-7
    algebraic: float = 1e-10

    def override(self, **kw) -> Tolerances:
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


DEFAULT_TOL = Tolerances()


class TrichotomyError(RuntimeError):
    """Three or more distinct extremal angles were found."""


class ClassificationError(RuntimeError):
    pass


class NotExtremalError(ValueError):
    pass


@dataclass(frozen=True)
class ExtremalSet:
    cara_value: float
    kind: str  # "single" | "pair" | "all"
    angles: tuple[float, ...] = ()

    @property
    def omegas(self) -> tuple[complex, ...]:
        return tuple(complex(math.cos(t), math.sin(t)) for t in self.angles)

    def to_json(self) -> dict:
        return {"c": self.cara_value, "kind": self.kind, "angles": list(self.angles)}


@dataclass(frozen=True)
class TangentClass:
    tag: str  # "royal" | "flat" | "purely_balanced" | "unique_extremal"
    params: dict = field(default_factory=dict)
    extremal: ExtremalSet | None = None


@dataclass(frozen=True)
class ExtremalityReport:
    max_abs: float
    metric_gap: float
    cara_value: float
    pushforward: DiskTangent
    passed: bool

    def to_json(self) -> dict:
        pf = self.pushforward
        return {
            "max_abs": self.max_abs,
            "metric_gap": self.metric_gap,
            "c": self.cara_value,
            "pushforward": {"z": [pf.z.real, pf.z.imag], "v": [pf.v.real, pf.v.imag]},
            "pass": self.passed,
        }


def _golden_max(f, a: float, b: float, tol: float) -> float:
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (a + b) / 2


def _local_maxima(f: np.ndarray, limit: int = 6) -> np.ndarray:
    """Indices of circular local maxima, best first."""
    left, right = np.roll(f, 1), np.roll(f, -1)
    idx = np.flatnonzero((f >= left) & (f > right))
    return idx[np.argsort(f[idx])[::-1][:limit]]


def profile_grid(delta: Tangent, n: int = DEFAULT_TOL.grid) -> tuple[np.ndarray, np.ndarray]:
    theta = TWO_PI * np.arange(n) / n
    return theta, magic.profile(delta, theta)


def _refine_peak(delta: Tangent, theta: np.ndarray, k: int, tol: Tolerances) -> float:
    n = len(theta)
    h = TWO_PI / n
    a, b = theta[k] - h, theta[k] + h
    t = _golden_max(lambda x: float(magic.profile(delta, x)), a, b, tol.theta)
    # golden section stalls near sqrt(eps) on a flat top, where values no longer
    # separate; the zero of the log-slope pins the maximizer to rounding level
    slope = lambda x: float(magic.profile_log_slope(delta, x))  # noqa: E731
    lo, hi = t - h / 64, t + h / 64
    if not slope(lo) > 0 > slope(hi):
        lo, hi = a, b
    if slope(lo) > 0 > slope(hi):
        t = brentq(slope, lo, hi, xtol=1e-15, rtol=1e-15)
    t %= TWO_PI
    return 0.0 if TWO_PI - t <= tol.theta else float(t)


def _circ_dist(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def extremal_set(delta: Tangent, tol: Tolerances = DEFAULT_TOL) -> ExtremalSet:
    """The set of omega on T for which Phi_omega solves Car delta."""
    delta.require_nondegenerate()
    theta, f = profile_grid(delta, tol.grid)
    fmax, fmin = float(f.max()), float(f.min())
    if (fmax - fmin) / fmax < tol.constancy:
        return ExtremalSet(fmax, "all", ())

    peaks = []
    for k in _local_maxima(f):
        t = _refine_peak(delta, theta, int(k), tol)
        peaks.append((t, float(magic.profile(delta, t))))
    c = max(v for _, v in peaks)
    angles: list[float] = []
    for t, v in sorted(peaks, key=lambda tv: -tv[1]):
        if v >= c * (1 - tol.cluster) and all(_circ_dist(t, u) > tol.angle for u in angles):
            angles.append(t)
    if len(angles) >= 3:
        raise TrichotomyError(f"trichotomy violated: {len(angles)} extremal angles {sorted(angles)}")
    return ExtremalSet(c, "single" if len(angles) == 1 else "pair", tuple(sorted(angles)))


def metric(delta: Tangent, tol: Tolerances = DEFAULT_TOL) -> float:
    """Carathéodory length c(delta)."""
    return extremal_set(delta, tol).cara_value


def distance(lam: SymPoint, mu: SymPoint, tol: Tolerances = DEFAULT_TOL) -> float:
    """Carathéodory distance between two points of G."""
    if lam == mu:
        return 0.0

    def d(t):
        w = np.exp(1j * np.asarray(t, dtype=float))
        return poincare_distance(magic.phi(w, lam.s, lam.p), magic.phi(w, mu.s, mu.p))

    n = tol.grid
    theta = TWO_PI * np.arange(n) / n
    f = d(theta)
    h = TWO_PI / n
    best = float(f.max())
    for k in _local_maxima(f):
        t = _golden_max(lambda x: float(d(x)), theta[k] - h, theta[k] + h, tol.theta)
        best = max(best, float(d(t)))
    return best


def push_general(F: GFunction, delta: Tangent) -> DiskTangent:
    """F_*(delta) = (F(lambda), D_v F(lambda)).

    Uses F's exact gradient when it has one, otherwise a central difference
    along v with one Richardson step.
    """
    delta.require_nondegenerate()
    s, p = delta.base
    vs, vp = delta.v
    val = complex(F(s, p))
    if F.grad is not None:
        gs, gp = F.grad(s, p)
        return DiskTangent(val, complex(vs * gs + vp * gp))
    nv = math.hypot(abs(vs), abs(vp))
    us, up = vs / nv, vp / nv
    h = 1e-5 * (1 + math.hypot(abs(s), abs(p)))

    def central(hh):
        return (F.raw(s + hh * us, p + hh * up) - F.raw(s - hh * us, p - hh * up)) / (2 * hh)

    d = (4 * central(h / 2) - central(h)) / 3
    return DiskTangent(val, complex(nv * d))


def _proportional(a: tuple[complex, complex], b: tuple[complex, complex]) -> float:
    """Normalised cross product |a0 b1 - a1 b0| / (|a| |b|); zero iff parallel."""
    na = math.hypot(abs(a[0]), abs(a[1]))
    nb = math.hypot(abs(b[0]), abs(b[1]))
    return abs(a[0] * b[1] - a[1] * b[0]) / (na * nb)


def _flat_beta(s: complex, p: complex) -> complex:
    # s = beta + conj(beta) p as a real 2x2 system in (Re beta, Im beta)
    a, b = p.real, p.imag
    x, y = np.linalg.solve([[1 + a, b], [b, 1 - a]], [s.real, s.imag])
    return complex(x, y)


def _recover_pb(delta: Tangent, es: ExtremalSet) -> dict:
    lam = delta.base
    tau1, tau2 = (w.conjugate() for w in es.omegas)
    z, w = unsymmetrize(lam)
    k = ((w - tau1) / (w - tau2)) / ((z - tau1) / (z - tau2))
    if abs(k.imag) > 1e-6 * abs(k) or k.real <= 0:
        raise ClassificationError(f"extremal pair {es.angles} does not come from a hyperbolic map (multiplier {k})")
    m = MobiusMap.hyperbolic(tau1, tau2, k.real)
    dm = m.derivative(z)
    hs, hp = 1 + dm, m(z) + z * dm
    c = (delta.v[0] * hs.conjugate() + delta.v[1] * hp.conjugate()) / (abs(hs) ** 2 + abs(hp) ** 2)
    resid = math.hypot(abs(delta.v[0] - c * hs), abs(delta.v[1] - c * hp))
    if resid > 1e-6 * math.hypot(abs(delta.v[0]), abs(delta.v[1])):
        raise ClassificationError(f"tangent direction is not c h_m'(z) (residual {resid:.3g})")
    return {"m": m, "z": z, "c": c, "fixed_points": (tau1, tau2)}


def classify(delta: Tangent, tol: Tolerances = DEFAULT_TOL) -> TangentClass:
    """Type of a non-degenerate tangent: royal, flat, purely_balanced or unique_extremal.

    Purely unbalanced and exceptional tangents are not told apart; both have a
    unique extremal Phi_omega and are reported as ``unique_extremal``.
    """
    delta.require_nondegenerate()
    s, p = delta.base
    v = delta.v
    es = extremal_set(delta, tol)

    tag, params = None, {}
    if abs(s * s - 4 * p) < tol.algebraic and _proportional(v, (1, s / 2)) < tol.algebraic:
        tag, params = "royal", {"z": s / 2, "c": v[0] / 2}
    else:
        beta = _flat_beta(s, p)
        if abs(beta) < 1 and _proportional(v, (beta.conjugate(), 1)) < tol.algebraic:
            tag, params = "flat", {"beta": beta, "z": p, "c": v[1]}

    if tag is not None:
        if es.kind != "all":
            raise ClassificationError(f"algebraic type {tag} but extremal set is {es.kind} {es.angles}")
        return TangentClass(tag, params, es)
    if es.kind == "all":
        raise ClassificationError("extremal set is all of T but the tangent is neither royal nor flat")
    if es.kind == "pair":
        return TangentClass("purely_balanced", _recover_pb(delta, es), es)
    return TangentClass("unique_extremal", {"omega": es.omegas[0]}, es)


def align(F: GFunction, delta: Tangent, tol: Tolerances = DEFAULT_TOL, cara_value: float | None = None) -> GFunction:
    """Return m o F with (m o F)_*(delta) = (0, c(delta))."""
    pf = push_general(F, delta)
    c = metric(delta, tol) if cara_value is None else cara_value
    if abs(poincare_metric(pf.z, pf.v) - c) > tol.extremality * c:
        raise NotExtremalError(
            f"cannot align non-extremal {F.label}: |F_* delta| = {poincare_metric(pf.z, pf.v)!r}, c = {c!r}"
        )
    out = mobius_after(aligning_map(pf.z, pf.v), F)
    chk = push_general(out, delta)
    if abs(chk.z) > 1e-12 or chk.v.real <= 0 or abs(chk.v.imag) > 1e-10 * abs(chk.v):
        raise NotExtremalError(f"alignment post-check failed: {chk}")
    return out


def verify_extremal(
    F: GFunction,
    delta: Tangent,
    seed: int = 0,
    n: int = 10_000,
    tol: Tolerances = DEFAULT_TOL,
    cara_value: float | None = None,
) -> ExtremalityReport:
    """Numerical certificate that F maps G into D and attains c(delta)."""
    s, p = sample_G(seed, n)
    max_abs = float(np.max(np.abs(F.raw(s, p))))
    c = metric(delta, tol) if cara_value is None else cara_value
    try:
        pf = push_general(F, delta)
    except SchurViolation:
        nan = complex("nan")
        return ExtremalityReport(max_abs, math.inf, c, DiskTangent(nan, nan), False)
    gap = abs(float(poincare_metric(pf.z, pf.v)) - c)
    return ExtremalityReport(max_abs, gap, c, pf, bool(max_abs < 1 and gap < tol.extremality * c))
