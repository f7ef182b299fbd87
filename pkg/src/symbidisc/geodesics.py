"""Complex geodesics of G: the royal disc, flat discs and purely balanced discs h_m."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .functions import GFunction
from .gdomain import SymPoint, Tangent, check_disk, sample_disk
from .mobius import MobiusMap, classify as classify_mobius

__all__ = [
    "GeodesicDisc",
    "GeodesicReport",
    "RoyalFlatIntersection",
    "fit_mobius",
    "flat_disc",
    "flat_tangent",
    "h_m_disc",
    "pb_tangent",
    "royal_disc",
    "royal_flat_intersection",
    "royal_tangent",
    "verify_geodesic",
]


@dataclass(frozen=True)
class GeodesicDisc:
    """An analytic disc k: D -> G with its derivative."""

    kind: str  # "royal" | "flat" | "pb"
    k: Callable
    dk: Callable
    params: dict = field(default_factory=dict)

    def __call__(self, z):
        return self.k(z)

    def tangent(self, z: complex, c: complex) -> Tangent:
        if c == 0:
            raise ValueError("c must be nonzero")
        z = check_disk(z)
        s, p = self.k(z)
        ds, dp = self.dk(z)
        return Tangent(SymPoint(s, p), (c * ds, c * dp))

    def to_json(self) -> dict:
        doc = {"type": self.kind}
        if self.kind == "flat":
            b = self.params["beta"]
            doc["beta"] = [b.real, b.imag]
        if self.kind == "pb":
            doc["mobius"] = self.params["m"].to_json()
        return doc


def royal_disc() -> GeodesicDisc:
    return GeodesicDisc("royal", lambda z: (2 * z, z * z), lambda z: (2 + 0 * z, 2 * z))


def royal_tangent(z: complex, c: complex) -> Tangent:
    """((2z, z^2), 2c(1, z))."""
    return royal_disc().tangent(z, c)


def flat_disc(beta: complex) -> GeodesicDisc:
    beta = check_disk(beta, "beta")
    bc = beta.conjugate()
    return GeodesicDisc(
        "flat", lambda w: (beta + bc * w, w), lambda w: (bc + 0 * w, 1 + 0 * w), {"beta": beta}
    )


def flat_tangent(beta: complex, z: complex, c: complex) -> Tangent:
    """((beta + conj(beta) z, z), c (conj(beta), 1))."""
    return flat_disc(beta).tangent(z, c)


def h_m_disc(m: MobiusMap) -> GeodesicDisc:
    """h_m(z) = (z + m(z), z m(z)) for a hyperbolic automorphism m."""
    mt = classify_mobius(m)
    if mt.tag != "hyperbolic":
        raise ValueError(f"h_m needs a hyperbolic automorphism, got {mt}")

    def dk(z):
        dm = m.derivative(z)
        return 1 + dm, m(z) + z * dm

    return GeodesicDisc("pb", lambda z: (z + m(z), z * m(z)), dk, {"m": m})


def pb_tangent(m: MobiusMap, z: complex, c: complex) -> Tangent:
    return h_m_disc(m).tangent(z, c)


@dataclass(frozen=True)
class RoyalFlatIntersection:
    zeta: complex
    eta: complex


def royal_flat_intersection(beta: complex) -> RoyalFlatIntersection:
    """The single point (2 zeta, zeta^2) = (beta + conj(beta) eta, eta) of R and F_beta."""
    beta = check_disk(beta, "beta")
    # in-disc root of conj(beta) x^2 - 2x + beta = 0, rationalised
    zeta = beta / (1 + math.sqrt(1 - abs(beta) ** 2))
    return RoyalFlatIntersection(zeta, zeta * zeta)


def fit_mobius(z, w) -> np.ndarray:
    """2x2 matrix of the Möbius map sending three points z_i to w_i."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    # a z + b - g z w - d w = 0 for each pair; null vector of a 3x4 system
    A = np.stack([z, np.ones(3), -z * w, -w], axis=1)
    a, b, g, d = np.linalg.svd(A)[2][-1].conj()
    return np.array([[a, b], [g, d]])


@dataclass(frozen=True)
class GeodesicReport:
    mode: str
    residual: float
    passed: bool
    fitted: MobiusMap | None = None


def verify_geodesic(
    k: GeodesicDisc, F: GFunction, seed: int = 0, n: int = 1000, mode: str = "identity", tol: float = 1e-9
) -> GeodesicReport:
    """Check F o k = id_D (``mode='identity'``) or F o k in Aut(D) (``mode='aut'``)."""
    rng = np.random.default_rng(seed)
    z = 0.95 * sample_disk(rng, n)
    vals = F.raw(*k(z))
    if mode == "identity":
        res = float(np.max(np.abs(vals - z)))
        return GeodesicReport(mode, res, res < tol)
    if mode != "aut":
        raise ValueError(f"unknown mode {mode!r}")
    nodes = np.array([0.0, 0.5, 0.5j])
    M = fit_mobius(nodes, F.raw(*k(nodes)))
    (a, b), (g, d) = M
    res = float(np.max(np.abs((a * z + b) / (g * z + d) - vals)))
    try:
        fitted = MobiusMap.from_matrix(M)
    except ValueError:
        return GeodesicReport(mode, res, False)
    # a genuine automorphism must also keep the unit circle invariant
    t = np.exp(2j * np.pi * np.arange(64) / 64)
    on_t = float(np.max(np.abs(np.abs((a * t + b) / (g * t + d)) - 1)))
    res = max(res, on_t)
    return GeodesicReport(mode, res, res < tol, fitted)
