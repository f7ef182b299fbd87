"""The magic functions Phi_omega(s, p) = (2 omega p - s) / (2 - omega s), omega on T.

All functions broadcast over numpy arrays of omega, s and p.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gdomain import DiskTangent, SymPoint, Tangent, poincare_metric

__all__ = [
    "EtaCircle",
    "eta_circle",
    "grad_phi",
    "model_vector_bound",
    "phi",
    "profile",
    "profile_log_slope",
    "push",
    "sup_abs_phi",
]


def phi(omega, s, p):
    return (2 * omega * p - s) / (2 - omega * s)


def grad_phi(omega, s, p):
    """Exact partial derivatives (d/ds, d/dp) of Phi_omega at (s, p)."""
    den = 2 - omega * s
    return 2 * (omega**2 * p - 1) / den**2, 2 * omega / den


def push(omega, delta: Tangent) -> DiskTangent:
    """(Phi_omega)_*(delta) = (Phi_omega(lambda), D_v Phi_omega(lambda))."""
    delta.require_nondegenerate()
    s, p = delta.base
    vs, vp = delta.v
    ds, dp = grad_phi(omega, s, p)
    return DiskTangent(phi(omega, s, p), vs * ds + vp * dp)


def profile(delta: Tangent, theta) -> np.ndarray:
    """Poincare length of (Phi_omega)_*(delta) at omega = exp(i theta)."""
    pt = push(np.exp(1j * np.asarray(theta, dtype=float)), delta)
    return poincare_metric(pt.z, pt.v)


def profile_log_slope(delta: Tangent, theta) -> np.ndarray:
    """d/dtheta of log(profile).

    With omega = exp(i theta) the profile equals 2 |Q(omega)| / L(omega), where
    Q(w) = (v_s p - v_p s) w^2 + 2 v_p w - v_s and
    L(w) = 4 (1 - |p|^2) - 4 Re(w (s - conj(s) p)).
    """
    s, p = delta.base
    vs, vp = delta.v
    w = np.exp(1j * np.asarray(theta, dtype=float))
    a2 = vs * p - vp * s
    Q = a2 * w**2 + 2 * vp * w - vs
    dQ = 2 * a2 * w + 2 * vp
    beta = s - s.conjugate() * p
    L = 4 * (1 - abs(p) ** 2) - 4 * np.real(w * beta)
    dL = 4 * np.imag(w * beta)  # d/dtheta of -4 Re(w beta)
    return np.real(np.conj(Q) * 1j * w * dQ) / np.abs(Q) ** 2 - dL / L


@dataclass(frozen=True)
class EtaCircle:
    """Image of the unit circle under eta -> Phi_eta(lambda)."""

    center: complex
    radius: float


def eta_circle(lam: SymPoint) -> EtaCircle:
    s, p = lam.s, lam.p
    den = 4 - abs(s) ** 2
    return EtaCircle(-2 * (s - s.conjugate() * p) / den, abs(s * s - 4 * p) / den)


def sup_abs_phi(s, p):
    """sup over eta in T of |Phi_eta(s, p)|, in closed form."""
    s = np.asarray(s, dtype=complex)
    p = np.asarray(p, dtype=complex)
    return (2 * np.abs(s - np.conj(s) * p) + np.abs(s * s - 4 * p)) / (4 - np.abs(s) ** 2)


def model_vector_bound(s, p):
    """Upper bound for ||u(s, p)|| in any unitary G-model of a Schur function."""
    s = np.asarray(s, dtype=complex)
    p = np.asarray(p, dtype=complex)
    a = 4 - np.abs(s) ** 2
    b = 2 * np.abs(s - np.conj(s) * p) + np.abs(s * s - 4 * p)
    return a / np.sqrt((a - b) * (a + b))
