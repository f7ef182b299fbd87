"""Automorphisms of the unit disc in the canonical form c (z - a) / (1 - conj(a) z)."""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .gdomain import check_disk

__all__ = ["MobiusMap", "MobiusType", "aligning_map", "classify", "compose", "invert"]

ON_CIRCLE_TOL = 1e-10
DISTINCT_TOL = 1e-8
IDENTITY_TOL = 1e-14


@dataclass(frozen=True)
class MobiusMap:
    """m(z) = c (z - alpha) / (1 - conj(alpha) z) with |c| = 1 and |alpha| < 1."""

    c: complex = 1 + 0j
    alpha: complex = 0j

    def __post_init__(self):
        c = complex(self.c)
        if c == 0:
            raise ValueError("c must be nonzero")
        object.__setattr__(self, "c", c / abs(c))
        object.__setattr__(self, "alpha", check_disk(self.alpha, "alpha"))

    @classmethod
    def identity(cls) -> MobiusMap:
        return cls(1, 0)

    @classmethod
    def from_matrix(cls, M) -> MobiusMap:
        """Canonical form of z -> (a z + b) / (g z + d) for a disc automorphism."""
        (a, b), (g, d) = np.asarray(M, dtype=complex)
        return cls(c=a / d, alpha=-b / a)

    @classmethod
    def hyperbolic(cls, tau1: complex, tau2: complex, k: float) -> MobiusMap:
        """The automorphism with boundary fixed points tau1, tau2 and multiplier k > 0.

        It satisfies (m(z) - tau1) / (m(z) - tau2) = k (z - tau1) / (z - tau2).
        """
        if not k > 0:
            raise ValueError("multiplier must be positive")
        S = np.array([[1, -tau1], [1, -tau2]], dtype=complex)
        return cls.from_matrix(np.linalg.solve(S, np.diag([k, 1.0]) @ S))

    def matrix(self) -> np.ndarray:
        c, a = self.c, self.alpha
        return np.array([[c, -c * a], [-a.conjugate(), 1]], dtype=complex)

    def __call__(self, z):
        return self.c * (z - self.alpha) / (1 - np.conj(self.alpha) * z)

    def derivative(self, z):
        a = self.alpha
        return self.c * (1 - abs(a) ** 2) / (1 - np.conj(a) * z) ** 2

    def to_json(self) -> dict:
        return {"c": [self.c.real, self.c.imag], "alpha": [self.alpha.real, self.alpha.imag]}

    @classmethod
    def from_json(cls, doc: dict) -> MobiusMap:
        return cls(complex(*doc["c"]), complex(*doc["alpha"]))


@dataclass(frozen=True)
class MobiusType:
    tag: str  # "identity" | "elliptic" | "parabolic" | "hyperbolic"
    fixed_points: tuple[complex, ...]


def apply(m: MobiusMap, z):
    return m(z)


def derivative(m: MobiusMap, z):
    return m.derivative(z)


def compose(m2: MobiusMap, m1: MobiusMap) -> MobiusMap:
    """The map z -> m2(m1(z))."""
    return MobiusMap.from_matrix(m2.matrix() @ m1.matrix())


def invert(m: MobiusMap) -> MobiusMap:
    # m^{-1}(z) = conj(c) (z + c alpha) / (1 + conj(c alpha) z)
    return MobiusMap(m.c.conjugate(), -m.c * m.alpha)


def classify(m: MobiusMap) -> MobiusType:
    c, a = m.c, m.alpha
    if abs(c - 1) < IDENTITY_TOL and abs(a) < IDENTITY_TOL:
        return MobiusType("identity", ())
    if a == 0:
        return MobiusType("elliptic", (0j,))
    # m(z) = z  <=>  conj(a) z^2 + (c - 1) z - c a = 0
    roots = np.roots([a.conjugate(), c - 1, -c * a])
    z1, z2 = (complex(r) for r in roots)
    on_t = abs(abs(z1) - 1) < ON_CIRCLE_TOL and abs(abs(z2) - 1) < ON_CIRCLE_TOL
    if on_t:
        if abs(z1 - z2) > DISTINCT_TOL:
            z1, z2 = z1 / abs(z1), z2 / abs(z2)
            return MobiusType("hyperbolic", tuple(sorted((z1, z2), key=_angle)))
        return MobiusType("parabolic", ((z1 + z2) / abs(z1 + z2),))
    inner = z1 if abs(z1) < abs(z2) else z2
    return MobiusType("elliptic", (inner,))


def aligning_map(z: complex, vc: complex) -> MobiusMap:
    """The unique automorphism m with m(z) = 0 and m'(z) vc > 0."""
    z = check_disk(z)
    vc = complex(vc)
    if vc == 0:
        raise ValueError("degenerate direction: vc = 0")
    # m'(z) = c / (1 - |z|^2), so c must cancel the phase of vc
    return MobiusMap(vc.conjugate() / abs(vc), z)


def _angle(w: complex) -> float:
    return cmath.phase(w) % (2 * cmath.pi)
