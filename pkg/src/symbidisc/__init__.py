"""Carathéodory extremal problem on the symmetrized bidisc G = {(z + w, zw) : |z|, |w| < 1}."""
from .caratheodory import (
    DEFAULT_TOL,
    ExtremalSet,
    Tolerances,
    align,
    classify,
    distance,
    extremal_set,
    metric,
    verify_extremal,
)
from .extremals import pb_extremal, pb_frame, recover_coefficients, royal_extremal
from .functions import GFunction, constant, phi_function
from .gdomain import DomainError, SymPoint, Tangent
from .geodesics import flat_tangent, pb_tangent, royal_tangent
from .mobius import MobiusMap

__version__ = "0.1.0"
