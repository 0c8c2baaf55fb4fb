"""
Two free summands: the ``(s, t)`` parametrization of ``lambda``.

With ``f(s) = tau((1 - sa)^-1)``, ``g(t) = tau((1 - tb)^-1)`` and the
constraint ``s f(s) = t g(t) != 0`` one sets
``lambda = (f + g - 1) / (s f) = 1/s + 1/t - 1/(s f)``.  Then
``lambda - a - b = (g/s) (1 - sa) (1 - a0 b0 / (f g)) (1 - tb)`` where
``a0, b0`` are the centered resolvents, and ``lambda`` is outside the
spectrum when ``||a0||^2 ||b0||^2 < |f g|^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import Cyclic, x_value
from .errors import ConstraintError, DegenerateError, InvalidInput
from .freesum import Classification
from .numkernel import ComplexPolynomial, poly_roots
from .oracle import AlgebraElement, cyclic_resolvent, generator

__all__ = [
    "TwoOpState", "lambda_of_st", "classify_two", "product_spectral_radius",
    "factorization_check", "feasible_t", "TWO_OP_BAND",
]

TWO_OP_BAND = 1e-8
CONSTRAINT_TOL = 1e-10


@dataclass(frozen=True)
class TwoOpState:
    s: complex
    t: complex
    f: complex
    g: complex
    lam: complex
    residual: float


def lambda_of_st(a_model, b_model, s, t) -> TwoOpState:
    s, t = complex(s), complex(t)
    f = a_model.mgf(s)
    g = b_model.mgf(t)
    sf, tg = s * f, t * g
    if sf == 0 or tg == 0:
        raise DegenerateError("s f(s) = 0: the parametrization needs s f(s) != 0")
    gap = abs(sf - tg)
    if gap > CONSTRAINT_TOL * max(1.0, abs(sf)):
        raise ConstraintError(f"s f(s) - t g(t) = {gap:.3g}")
    lam_ratio = (f + g - 1) / sf
    lam_sum = 1 / s + 1 / t - 1 / sf
    disagreement = abs(lam_ratio - lam_sum)
    if disagreement > 1e-10 * max(1.0, abs(lam_sum)):
        raise ConstraintError(f"the two lambda formulas disagree by {disagreement:.3g}")
    return TwoOpState(s, t, f, g, lam_sum, float(max(gap, disagreement)))


def classify_two(a_model, b_model, s, t) -> Classification:
    """Compare ``x_a x_b`` with 1, where ``x = ||centered||^2 / |f|^2``."""
    lambda_of_st(a_model, b_model, s, t)
    p = x_value(a_model, s) * x_value(b_model, t)
    if abs(p - 1) <= TWO_OP_BAND:
        return Classification.BOUNDARY
    if p < 1:
        return Classification.OUTSIDE
    return Classification.UNDETERMINED


def product_spectral_radius(x_a_norm_sq: float, x_b_norm_sq: float) -> float:
    """``rho(ab) = ||a||_2 ||b||_2`` for centered *-free ``a``, ``b``.

    The whole circle of this radius belongs to the spectrum of ``ab``.
    """
    if x_a_norm_sq < 0 or x_b_norm_sq < 0:
        raise InvalidInput("squared norms must be nonnegative")
    return math.sqrt(x_a_norm_sq * x_b_norm_sq)


def feasible_t(m: int, n: int, s) -> complex:
    """Solve ``s (1 - t^n) = t (1 - s^m)`` for ``t`` on the branch ``t ~ s``.

    Among the ``n`` roots the one closest to ``s`` is taken; for small
    ``|s|`` this is the branch that tends to 0 with ``s``.
    """
    s = complex(s)
    coeffs = [s, -(1 - s**m)] + [0] * (n - 2) + [-s]
    if s == 0:
        return 0j
    roots = poly_roots(ComplexPolynomial(tuple(coeffs)))
    return complex(min(roots, key=lambda r: abs(r - s)))


def factorization_check(m: int, n: int, s, t) -> float:
    """Largest coefficient deviation between both sides of the factorization.

    Both ``lambda - u - v`` and ``(g/s)(1 - su)(1 - a0 b0/(fg))(1 - tv)`` are
    expanded exactly in the group algebra of ``Z_m * Z_n``; every factor is a
    finite combination of words because ``(1 - su)^-1`` is.
    """
    s, t = complex(s), complex(t)
    a, b = Cyclic(m), Cyclic(n)
    if abs(1 - s**m) == 0 or abs(1 - t**n) == 0:
        raise ConstraintError("s^m = 1 or t^n = 1")
    st = lambda_of_st(a, b, s, t)
    orders = (m, n)
    u, v = generator(orders, 0), generator(orders, 1)
    one = AlgebraElement.identity(orders)
    lhs = st.lam * one - u - v
    a0 = cyclic_resolvent(orders, 0, s) - st.f
    b0 = cyclic_resolvent(orders, 1, t) - st.g
    middle = one - (a0 * b0) / (st.f * st.g)
    rhs = (st.g / s) * ((one - s * u) * middle * (one - t * v))
    return float(lhs.max_deviation(rhs))
