"""Explicit Carathéodory extremal functions for royal and purely balanced tangents,
and the coefficient representation of well-aligned extremals for purely
balanced tangents.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import magic
from .caratheodory import DEFAULT_TOL, Tolerances, classify, push_general
from .functions import GFunction, SchurViolation, mobius_after, phi_function
from .gdomain import SymPoint, Tangent, check_disk
from .geodesics import royal_flat_intersection
from .mobius import MobiusMap, aligning_map
from .realization import BlockOperator, lft_eval

__all__ = [
    "FlatExtremalData",
    "IdentifiabilityError",
    "ModelCoefficients",
    "PBFrame",
    "check_coefficient_bound",
    "flat_extremal_data",
    "pb_extremal",
    "pb_extremal_direct",
    "pb_frame",
    "recover_coefficients",
    "royal_extremal",
    "solve_coefficients",
    "szego_kernel",
]

PSI_SLACK = 1e-12
SEP_TOL = 1e-8


class IdentifiabilityError(ValueError):
    pass


def _checked(psi: GFunction, s, p):
    val = psi.raw(s, p)
    if np.max(np.abs(val)) > 1 + PSI_SLACK:
        raise SchurViolation(f"psi = {psi.label} left the closed disc: {np.max(np.abs(val))!r}")
    return val


def _psi_grad(psi: GFunction, s, p):
    if psi.grad is None:
        return None
    return psi.grad(s, p)


def royal_extremal(m: MobiusMap, psi: GFunction) -> GFunction:
    """F(s, p) = m(s/2 + (s^2 - 4p)/4 * psi / (1 - s psi / 2)).

    Solves Car delta for every royal tangent delta.
    """

    def inner(s, p):
        ps = _checked(psi, s, p)
        return s / 2 + (s * s - 4 * p) / 4 * ps / (1 - s * ps / 2)

    grad = None
    if psi.grad is not None:

        def grad(s, p):
            ps = _checked(psi, s, p)
            gs, gp = psi.grad(s, p)
            den = 1 - s * ps / 2
            q = s * s - 4 * p
            d_s = 0.5 + s / 2 * ps / den + q / 4 * (gs + ps * ps / 2) / den**2
            d_p = -ps / den + q / 4 * gp / den**2
            dm = m.derivative(inner(s, p))
            return dm * d_s, dm * d_p

    params = {"family": "royal", "m": m.to_json(), "psi": (psi.params or {}).get("psi")}
    return GFunction(lambda s, p: m(inner(s, p)), grad, label=f"royal[{psi.label}]", params=params)


@dataclass(frozen=True)
class PBFrame:
    """The two well-aligned magic extremals phi_j = m_j o Phi_{omega_j} of a purely balanced tangent."""

    delta: Tangent
    omegas: tuple[complex, complex]
    maps: tuple[MobiusMap, MobiusMap]
    phis: tuple[GFunction, GFunction]
    cara_value: float


def pb_frame(delta: Tangent, tol: Tolerances = DEFAULT_TOL) -> PBFrame:
    tc = classify(delta, tol)
    if tc.tag != "purely_balanced":
        raise ValueError(f"pb_frame needs a purely balanced tangent, got {tc.tag}")
    omegas = tc.extremal.omegas
    maps, phis = [], []
    for w in omegas:
        Phi = phi_function(w)
        pf = push_general(Phi, delta)
        m = aligning_map(pf.z, pf.v)
        maps.append(m)
        phis.append(mobius_after(m, Phi))
    return PBFrame(delta, tuple(omegas), tuple(maps), tuple(phis), tc.extremal.cara_value)


def _pb_coeffs(r: float):
    if not 0 <= r <= 1:
        raise ValueError(f"r = {r} outside [0, 1]")
    return math.sqrt(r * (1 - r))


def pb_extremal_direct(frame: PBFrame, r: float, psi: GFunction) -> GFunction:
    """r phi1 + (1-r) phi2 + r(1-r)(phi1 - phi2)^2 psi / (1 - [(1-r) phi1 + r phi2] psi), evaluated literally."""
    _pb_coeffs(r)
    f1, f2 = frame.phis

    def f(s, p):
        a, b = f1.func(s, p), f2.func(s, p)
        ps = _checked(psi, s, p)
        return r * a + (1 - r) * b + r * (1 - r) * (a - b) ** 2 * ps / (1 - ((1 - r) * a + r * b) * ps)

    return GFunction(f, label=f"pb-direct[r={r}]")


def pb_extremal(frame: PBFrame, r: float, psi: GFunction) -> GFunction:
    """Extremal F = F_T(psi) with T = U_r diag(phi1, phi2) U_r, U_r = [[sqrt r, sqrt(1-r)], [sqrt(1-r), -sqrt r]].

    F is well aligned at the frame's tangent for every r in [0, 1] and every
    Schur-class psi.
    """
    q = _pb_coeffs(r)
    f1, f2 = frame.phis

    def blocks(s, p):
        a, b = f1.func(s, p), f2.func(s, p)
        A = r * a + (1 - r) * b
        B = q * (a - b)
        D = (1 - r) * a + r * b
        return a, b, A, B, D

    def f(s, p):
        _, _, A, B, D = blocks(s, p)
        ps = _checked(psi, s, p)
        T = BlockOperator.from_blocks(*(x[..., None, None] for x in (A, B, B, D)))
        return lft_eval(T, np.asarray(ps)[..., None, None])[..., 0, 0]

    grad = None
    if f1.grad is not None and f2.grad is not None and psi.grad is not None:

        def grad(s, p):
            _, _, _, B, D = blocks(s, p)
            ps = _checked(psi, s, p)
            out = []
            for g1, g2, gps in zip(f1.grad(s, p), f2.grad(s, p), psi.grad(s, p)):
                dA = r * g1 + (1 - r) * g2
                dB = q * (g1 - g2)
                dD = (1 - r) * g1 + r * g2
                den = 1 - D * ps
                out.append(dA + 2 * B * dB * ps / den + B * B * (gps + ps * ps * dD) / den**2)
            return tuple(out)

    params = {
        "family": "pb",
        "r": r,
        "omegas": [[w.real, w.imag] for w in frame.omegas],
        "psi": (psi.params or {}).get("psi"),
    }
    return GFunction(f, grad, label=f"pb[r={r}, {psi.label}]", params=params)


def szego_kernel(alpha: complex, z):
    """Normalised Szegő kernel K_alpha(z) = sqrt(1 - |alpha|^2) / (1 - conj(alpha) z)."""
    alpha = check_disk(alpha, "alpha")
    return math.sqrt(1 - abs(alpha) ** 2) / (1 - alpha.conjugate() * z)


@dataclass(frozen=True)
class ModelCoefficients:
    mu: SymPoint
    u1: complex
    u2: complex
    residual: float

    @property
    def norm_sq(self) -> float:
        return abs(self.u1) ** 2 + abs(self.u2) ** 2


def _weights(frame: PBFrame, s, p):
    """(sqrt(1 - |alpha_j|^2) / (1 + conj(alpha_j c_j) phi_j(mu)), phi_j(mu)) for j = 1, 2."""
    out = []
    for m, f in zip(frame.maps, frame.phis):
        ph = f.func(s, p)
        out.append((math.sqrt(1 - abs(m.alpha) ** 2) / (1 + np.conj(m.alpha * m.c) * ph), ph))
    return out


def solve_coefficients(F: GFunction, frame: PBFrame, s, p):
    """Batched form of :func:`recover_coefficients` over arrays s, p.

    Returns (u1, u2, residual, separation) arrays, separation = |phi1 - phi2|;
    entries with small separation are not meaningful and are left to the caller.
    """
    (w1, a), (w2, b) = _weights(frame, s, p)
    fm = F.raw(s, p)
    M = np.stack([np.stack([w1, w2], -1), np.stack([w1 * a, w2 * b], -1)], -2)
    rhs = np.stack([np.ones_like(fm), fm], -1)
    sep = np.abs(a - b)
    safe = np.where(sep[..., None, None] > 0, M, np.eye(2))
    u = np.linalg.solve(safe, rhs[..., None])[..., 0]
    res = np.max(np.abs((M @ u[..., None])[..., 0] - rhs), axis=-1)
    return u[..., 0], u[..., 1], res, sep


def recover_coefficients(F: GFunction, frame: PBFrame, mu: SymPoint, sep_tol: float = SEP_TOL) -> ModelCoefficients:
    """Solve for (u1, u2) at mu from
        sum_j w_j u_j = 1  and  sum_j w_j phi_j(mu) u_j = F(mu),
    with w_j = sqrt(1 - |alpha_j|^2) / (1 + conj(alpha_j c_j) phi_j(mu)).
    """
    u1, u2, res, sep = solve_coefficients(F, frame, np.array([mu.s]), np.array([mu.p]))
    if sep[0] < sep_tol:
        raise IdentifiabilityError(f"coefficients not identifiable at {mu}: |phi1 - phi2| = {sep[0]:.3g}")
    return ModelCoefficients(mu, complex(u1[0]), complex(u2[0]), float(res[0]))


def check_coefficient_bound(coef: ModelCoefficients, slack: float = 1e-9) -> bool:
    mu = coef.mu
    return bool(coef.norm_sq <= magic.model_vector_bound(mu.s, mu.p) ** 2 + slack)


@dataclass(frozen=True)
class FlatExtremalData:
    """Data fixing the well-aligned extremals of a flat tangent.

    Any h in the Schur class of D with h(zeta) = m(eta) determines one; ``target``
    is the required value m(eta).
    """

    zeta: complex
    eta: complex
    m: MobiusMap
    target: complex


def flat_extremal_data(beta: complex, z: complex, c: complex) -> FlatExtremalData:
    x = royal_flat_intersection(beta)
    m = aligning_map(z, c)
    return FlatExtremalData(x.zeta, x.eta, m, complex(m(x.eta)))
