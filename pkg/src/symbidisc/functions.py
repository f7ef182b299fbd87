"""Holomorphic functions on G with values in the (closed) unit disc."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import magic
from .mobius import MobiusMap

__all__ = ["GFunction", "SchurViolation", "constant", "mobius_after", "phi_function"]

Gradient = Callable[..., tuple]

CLOSED_SLACK = 1e-12


class SchurViolation(ValueError):
    """A function left the disc it is supposed to map into."""


@dataclass(frozen=True)
class GFunction:
    """A vectorised map (s, p) -> complex on G, optionally with its exact gradient.

    ``closed=False`` declares F in Hol(G, D) (|F| < 1 enforced); ``closed=True``
    declares a Schur-class function (|F| <= 1 up to rounding).
    """

    func: Callable
    grad: Optional[Gradient] = None
    label: str = ""
    closed: bool = False
    params: Optional[dict] = None

    def raw(self, s, p):
        return self.func(s, p)

    def __call__(self, s, p):
        val = self.func(s, p)
        mod = np.max(np.abs(val))
        bad = mod > 1 + CLOSED_SLACK if self.closed else not mod < 1
        if bad:
            kind = "closed" if self.closed else "open"
            raise SchurViolation(f"{self.label or 'function'} left the {kind} disc: |F| = {mod!r}")
        return val

    def gradient(self, s, p):
        if self.grad is None:
            raise AttributeError(f"{self.label or 'function'} has no exact gradient")
        return self.grad(s, p)


def phi_function(omega: complex) -> GFunction:
    return GFunction(
        lambda s, p: magic.phi(omega, s, p),
        lambda s, p: magic.grad_phi(omega, s, p),
        label=f"Phi[{omega:.6g}]",
    )


def constant(a: complex) -> GFunction:
    a = complex(a)

    def f(s, p):
        return np.broadcast_to(a, np.broadcast(s, p).shape).astype(complex)[()]

    def g(s, p):
        z = np.zeros(np.broadcast(s, p).shape, dtype=complex)[()]
        return z, z

    return GFunction(f, g, label=f"const[{a:.6g}]", closed=abs(a) >= 1)


def mobius_after(m: MobiusMap, F: GFunction) -> GFunction:
    """m o F, carrying the gradient through the chain rule when F has one."""
    grad = None
    if F.grad is not None:

        def grad(s, p):
            d = m.derivative(F.func(s, p))
            gs, gp = F.grad(s, p)
            return d * gs, d * gp

    return GFunction(lambda s, p: m(F.func(s, p)), grad, label=f"m o {F.label}", closed=F.closed)
