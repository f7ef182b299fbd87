"""Points and tangents of the unit disc D and the symmetrized bidisc G.

G = {(z + w, z w) : |z| < 1, |w| < 1} = {(s, p) : |s - conj(s) p| < 1 - |p|^2}.
Everything here works on plain complex scalars; the vectorised helpers accept
numpy arrays as well.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "DiskTangent",
    "SymPoint",
    "Tangent",
    "check_disk",
    "contains",
    "in_G",
    "poincare_distance",
    "poincare_metric",
    "sample_disk",
    "sample_G",
    "symmetrize",
    "unsymmetrize",
]


class DomainError(ValueError):
    """A point lies outside the domain it was declared in."""


def check_disk(z: complex, name: str = "z") -> complex:
    z = complex(z)
    if not abs(z) < 1.0:
        raise DomainError(f"{name}={z} is not in the open unit disc")
    return z


def contains(s: complex, p: complex) -> bool:
    """Strict membership test for G; boundary points are rejected."""
    s, p = complex(s), complex(p)
    return abs(s - s.conjugate() * p) < 1.0 - abs(p) ** 2


def in_G(s, p) -> np.ndarray:
    """Vectorised version of :func:`contains`."""
    s = np.asarray(s, dtype=complex)
    p = np.asarray(p, dtype=complex)
    return np.abs(s - np.conj(s) * p) < 1.0 - np.abs(p) ** 2


@dataclass(frozen=True)
class SymPoint:
    """A point (s, p) of G."""

    s: complex
    p: complex

    def __post_init__(self):
        object.__setattr__(self, "s", complex(self.s))
        object.__setattr__(self, "p", complex(self.p))
        if not contains(self.s, self.p):
            raise DomainError(f"point not in G: (s, p) = ({self.s}, {self.p})")

    def __iter__(self):
        yield self.s
        yield self.p


@dataclass(frozen=True)
class Tangent:
    """An infinitesimal datum delta = (lambda, v) with v = (v_s, v_p)."""

    base: SymPoint
    v: tuple[complex, complex]

    def __post_init__(self):
        vs, vp = self.v
        object.__setattr__(self, "v", (complex(vs), complex(vp)))

    @property
    def degenerate(self) -> bool:
        return self.v == (0j, 0j)

    def require_nondegenerate(self) -> Tangent:
        if self.degenerate:
            raise DomainError("degenerate tangent: v = (0, 0)")
        return self

    def scaled(self, t: complex) -> Tangent:
        return Tangent(self.base, (t * self.v[0], t * self.v[1]))


@dataclass(frozen=True)
class DiskTangent:
    """A tangent (z, v) to the unit disc."""

    z: complex
    v: complex


def symmetrize(z: complex, w: complex) -> SymPoint:
    z = check_disk(z, "z")
    w = check_disk(w, "w")
    return SymPoint(z + w, z * w)


def unsymmetrize(lam: SymPoint) -> tuple[complex, complex]:
    """Roots {z, w} of x^2 - s x + p = 0, i.e. the preimage of lam.

    One root is taken from the larger-modulus branch of the quadratic formula
    and the other from Vieta (p / root) to avoid cancellation.
    """
    s, p = lam.s, lam.p
    sq = cmath.sqrt(s * s - 4 * p)
    # pick the sign that makes |s + sq| the larger of |s +- sq|
    if (s.conjugate() * sq).real < 0:
        sq = -sq
    q = (s + sq) / 2
    if q == 0:
        z, w = 0j, 0j
    else:
        z, w = q, p / q
    if abs(z) >= 1 or abs(w) >= 1:
        raise DomainError(f"root outside D while unsymmetrizing {lam}: {z}, {w}")
    return z, w


def sample_disk(rng: np.random.Generator, n: int) -> np.ndarray:
    """n points uniform (in area) on the open unit disc."""
    r = np.sqrt(rng.random(n))
    t = 2 * np.pi * rng.random(n)
    return r * np.exp(1j * t)


def sample_G(seed: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic sample of n points of G as arrays (s, p).

    Each point symmetrizes two independent uniform disc draws.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    z = sample_disk(rng, n)
    w = sample_disk(rng, n)
    return z + w, z * w


def poincare_metric(z, v):
    """|(z, v)| = |v| / (1 - |z|^2). Works elementwise on arrays."""
    return np.abs(v) / _one_minus_sq(z)


def _one_minus_sq(z):
    # 1 - |z|^2 as (1 - |z|)(1 + |z|); the first factor is an exact subtraction
    r = np.abs(z)
    return (1.0 - r) * (1.0 + r)


def poincare_distance(z, w):
    """d(z, w) = atanh |(z - w) / (1 - conj(w) z)|."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    # atanh(rho) = log((|1 - conj(w) z| + |z - w|) / sqrt((1 - |z|^2)(1 - |w|^2))),
    # free of the cancellation in 1 - rho near the boundary
    num = np.abs(1.0 - np.conj(w) * z) + np.abs(z - w)
    den = np.sqrt(_one_minus_sq(z) * _one_minus_sq(w))
    out = np.log(num / den)
    return np.where(z == w, 0.0, out)[()]
