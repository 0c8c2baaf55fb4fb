"""
Resolvent criterion for free sums.

For free summands ``a_1, ..., a_n`` with moment generating functions
``f_i`` a point ``lambda`` is parametrized by numbers ``z != 0`` and ``s_i``
with ``s_i f_i(s_i) = z`` and ``lambda = 1/z + sum(1/s_i - 1/z)``.  With
``x_i = ||S_i||_2^2`` the squared norm of the normalized centered resolvent
of summand ``i``, the quantity ``Phi = sum x_i / (1 + x_i)`` decides:
``Phi < 1`` certifies ``lambda`` outside the spectrum and the resolvent
has L2-norm ``|z|^2 / (1 - Phi)``.  ``Phi = 1`` with nearby ``Phi < 1``
marks the outer border.

The parameter system is solved by Newton's method, continued along a ray
from the neighbourhood of infinity where ``z ~ s_i ~ 1/lambda``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import series
from .distributions import Cyclic, FreeSumModel, OperatorModel, x_value
from .errors import (CapError, DegenerateError, DivergenceError, InvalidInput,
                     NoConvergence, NumericFailure, PoleError)
from .numkernel import NewtonProblem, newton_solve

__all__ = [
    "ParameterState", "Classification", "CriterionReport", "solve_parameters",
    "continue_parameters", "criterion", "phi_value", "scalar_alternating_sum",
    "symmetric_criterion", "elementary_symmetric", "free_convolution_moments",
    "outer_radius", "BOUNDARY_BAND",
]

BOUNDARY_BAND = 1e-8
SOLVE_TOL = 1e-11
MOMENT_CAP = 64


class Classification(str, Enum):
    OUTSIDE = "Outside"
    BOUNDARY = "Boundary"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class ParameterState:
    lam: complex
    z: complex
    s: tuple
    residual: float
    branch_seed: Optional["ParameterState"] = field(default=None, repr=False, compare=False)

    @property
    def vector(self) -> np.ndarray:
        return np.array((self.z,) + tuple(self.s), dtype=complex)


@dataclass(frozen=True)
class CriterionReport:
    state: ParameterState
    x: tuple
    phi: float
    classification: Classification
    l2_norm_sq: float


def _models(models) -> tuple:
    if isinstance(models, OperatorModel):
        return (models,)
    return tuple(models)


def outer_radius(models) -> float:
    """Radius beyond which a fresh solve from ``z = s_i = 1/lambda`` is safe."""
    return sum(m.norm_bound for m in _models(models)) + 1.0


def _partial_products(s):
    """Products of all entries but one, and of all entries but two."""
    n = len(s)
    but_one = [math.prod(s[:i] + s[i + 1:]) for i in range(n)]
    but_two = [[math.prod(v for k, v in enumerate(s) if k != i and k != j) if i != j else 0
                for j in range(n)] for i in range(n)]
    return but_one, but_two


def _system(models, lam):
    n = len(models)
    # the cleared equation is of size |lam|^-n near infinity; rescale it to O(1)
    w = max(1.0, abs(lam)) ** n

    def residual(x):
        z, s = complex(x[0]), [complex(v) for v in x[1:]]
        out = np.empty(n + 1, dtype=complex)
        for i, (mdl, si) in enumerate(zip(models, s)):
            out[i] = si * mdl.mgf(si) - z
        prod = math.prod(s)
        but_one, _ = _partial_products(s)
        # lambda = (1 - n)/z + sum 1/s_i, multiplied through by z * prod(s)
        out[n] = w * (lam * z * prod - (1 - n) * prod - z * sum(but_one))
        return out

    def jacobian(x):
        z, s = complex(x[0]), [complex(v) for v in x[1:]]
        J = np.zeros((n + 1, n + 1), dtype=complex)
        for i, (mdl, si) in enumerate(zip(models, s)):
            J[i, 0] = -1
            J[i, i + 1] = mdl.mgf(si) + si * mdl.mgf_prime(si)
        prod = math.prod(s)
        but_one, but_two = _partial_products(s)
        J[n, 0] = w * (lam * prod - sum(but_one))
        for k in range(n):
            J[n, k + 1] = w * (lam * z * but_one[k] - (1 - n) * but_one[k] - z * sum(but_two[k]))
        return J

    return residual, jacobian


def _state_residual(models, lam, z, s) -> float:
    r = max(abs(si * m.mgf(si) - z) for m, si in zip(models, s))
    n = len(models)
    r_lam = abs(lam - ((1 - n) / z + sum(1 / si for si in s)))
    return float(max(r, r_lam))


def _newton(models, lam, x0, tol=1e-14, max_iterations=60):
    residual, jacobian = _system(models, lam)
    scale = max(1.0, abs(lam))
    problem = NewtonProblem(residual, jacobian, tol=tol * scale,
                            max_iterations=max_iterations, dimension=len(models) + 1)
    try:
        res = newton_solve(problem, x0)
    except PoleError as exc:
        raise NoConvergence(f"iterate hit a singularity: {exc}") from exc
    return res


def _finish(models, lam, x, seed, tol=SOLVE_TOL) -> ParameterState:
    z, s = complex(x[0]), tuple(complex(v) for v in x[1:])
    if abs(z) < 1e-300 or any(abs(v) < 1e-300 for v in s):
        raise DegenerateError("parametrization degenerates (z = 0 or s_i = 0)")
    try:
        r = _state_residual(models, lam, z, s)
    except (PoleError, ZeroDivisionError) as exc:
        raise DegenerateError(str(exc)) from exc
    if not r <= tol:
        raise NoConvergence(f"residual {r:.3g} exceeds {tol:.1g}")
    return ParameterState(complex(lam), z, s, r, seed)


def _tangent(models, state, dlam):
    """Euler predictor: dx/dlambda from the implicit function theorem."""
    residual, jacobian = _system(models, state.lam)
    x = state.vector
    J = jacobian(x)
    n = len(models)
    dF = np.zeros(n + 1, dtype=complex)
    dF[n] = max(1.0, abs(state.lam)) ** n * x[0] * math.prod(complex(v) for v in x[1:])
    try:
        dx = -np.linalg.solve(J, dF)
    except np.linalg.LinAlgError:
        return x
    pred = x + dlam * dx
    if not np.all(np.isfinite(pred)):
        return x
    return pred


# relative imaginary kick applied to every predictor; a real iterate at a
# real lambda past a branch point otherwise cannot leave the real axis
_KICK = 1e-7


def _corrector(models, lam, state, max_jump=0.35):
    pred = _tangent(models, state, lam - state.lam)
    pred = pred * (1 + 1j * _KICK)
    res = _newton(models, lam, pred)
    jump = np.max(np.abs(res.x - state.vector))
    size = max(np.max(np.abs(state.vector)), 1e-12)
    if jump > max_jump * size:
        raise NoConvergence(f"branch jump of relative size {jump / size:.3g}")
    return _finish(models, lam, res.x, state)


def continue_parameters(models, state: ParameterState, lam, min_step=1e-9) -> ParameterState:
    """Continue ``state`` along the straight segment to ``lam``.

    Steps are halved on failure until ``min_step`` (relative to the segment
    length) is reached, at which point NoConvergence is raised.
    """
    models = _models(models)
    lam = complex(lam)
    total = lam - state.lam
    if total == 0:
        return state
    t, h = 0.0, 1.0
    cur = state
    while t < 1.0:
        h = min(h, 1.0 - t)
        target = state.lam + (t + h) * total if t + h < 1.0 else lam
        try:
            nxt = _corrector(models, target, cur)
        except (NumericFailure, DegenerateError) as exc:
            h *= 0.5
            if h < min_step:
                raise NoConvergence(f"continuation stalled at lambda={cur.lam}: {exc}") from exc
            continue
        cur = nxt
        t += h
        h *= 2.0
    return cur


def _fresh(models, lam) -> ParameterState:
    x0 = np.full(len(models) + 1, 1 / lam, dtype=complex)
    res = _newton(models, lam, x0)
    return _finish(models, lam, res.x, None)


def solve_parameters(models, lam, seed: Optional[ParameterState] = None,
                     step: Optional[float] = None) -> ParameterState:
    """Solve ``s_i f_i(s_i) = z``, ``lambda = 1/z + sum(1/s_i - 1/z)``.

    Without a seed, points with ``|lambda| > sum(norm bounds) + 1`` are solved
    directly from ``z = s_i = 1/lambda``; points further in are reached by
    continuation along the ray from that radius, so the result always lies
    on the branch that behaves like ``1/lambda`` at infinity.
    """
    models = _models(models)
    if not models:
        raise InvalidInput("need at least one summand")
    lam = complex(lam)
    if seed is not None:
        return continue_parameters(models, seed, lam)
    R = outer_radius(models)
    if abs(lam) > R:
        return _fresh(models, lam)
    if lam == 0:
        raise DegenerateError("lambda = 0 cannot be reached along a ray from infinity")
    direction = lam / abs(lam)
    state = _fresh(models, R * 1.0000001 * direction)
    h = 0.02 * R if step is None else step
    r = abs(state.lam)
    while r - h > abs(lam):
        r -= h
        state = continue_parameters(models, state, r * direction)
    return continue_parameters(models, state, lam)


def phi_value(x) -> float:
    return float(sum(xi / (1 + xi) for xi in x))


def _alternate_terms(models, s):
    # variant denominators: N / (|1 - s^n|^2 + N) with N = |s|^2 + ... + |s|^(2n-2)
    out = []
    for mdl, si in zip(models, s):
        if not isinstance(mdl, Cyclic):
            raise InvalidInput("the alternate criterion form needs Cyclic summands")
        num = x_value(mdl, si)
        out.append(num / (abs(1 - si**mdl.m) ** 2 + num))
    return out


def criterion(models, state: ParameterState, form: str = "standard") -> CriterionReport:
    """Evaluate ``Phi`` and classify ``state.lam``.

    ``form="alternate"`` switches to the variant denominators |1 - s^n|^2 + ... used
    for sums of cyclic generators; it is kept for comparison only.
    """
    models = _models(models)
    if state.residual > 1e-9:
        raise InvalidInput(f"state residual {state.residual:.3g} too large for the criterion")
    try:
        x = tuple(x_value(m, si) for m, si in zip(models, state.s))
    except PoleError as exc:
        raise DegenerateError(str(exc)) from exc
    if form == "standard":
        phi = phi_value(x)
    elif form == "alternate":
        phi = float(sum(_alternate_terms(models, state.s)))
    else:
        raise InvalidInput(f"unknown criterion form {form!r}")
    if abs(phi - 1) <= BOUNDARY_BAND:
        cls = Classification.BOUNDARY
    elif phi < 1:
        cls = Classification.OUTSIDE
    else:
        cls = Classification.UNDETERMINED
    l2 = abs(state.z) ** 2 / (1 - phi) if phi < 1 else math.inf
    return CriterionReport(state, x, phi, cls, l2)


# ---------------------------------------------------------------------------
# scalar identities


def scalar_alternating_sum(x: Sequence[float], N: int = 60):
    """Sum of alternating products of ``x`` up to length ``N`` and its limit.

    Returns ``(truncated, closed)`` where ``truncated = 1 + sum over words
    i_1 != i_2 != ... of length <= N of x_{i_1} ... x_{i_n}`` and
    ``closed = 1 / (1 - sum x_i / (1 + x_i))``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise InvalidInput("x must be nonnegative")
    phi = phi_value(x)
    if phi >= 1:
        raise DivergenceError(f"alternating sum diverges: sum x/(1+x) = {phi:.6g}", phi)
    # a[i] = total weight of alternating words of the current length ending in i
    a = x.copy()
    total = 1.0 + a.sum()
    for _ in range(N - 1):
        a = x * (a.sum() - a)
        total += a.sum()
    return float(total), 1.0 / (1.0 - phi)


def elementary_symmetric(x) -> list:
    """``[E_0, E_1, ..., E_n]`` from the product ``prod (1 + t x_i)``."""
    e = [1.0]
    for xi in x:
        e = [a + xi * b for a, b in zip(e + [0.0], [0.0] + e)]
    return e


def symmetric_criterion(x):
    """Both forms of the convergence condition.

    Returns ``(sum_form, esym_form, (sum_form < 1, esym_form < 1))`` with
    ``esym_form = sum_k (k - 1) E_k(x)``.
    """
    x = [float(v) for v in x]
    if any(v < 0 for v in x):
        raise InvalidInput("x must be nonnegative")
    sum_form = phi_value(x)
    e = elementary_symmetric(x)
    esym_form = float(sum((k - 1) * ek for k, ek in enumerate(e) if k >= 1))
    return sum_form, esym_form, (sum_form < 1, esym_form < 1)


# ---------------------------------------------------------------------------
# moments of free sums through R-transforms


def _exactify(m):
    if isinstance(m, bool):
        raise InvalidInput("moments must be numbers")
    if isinstance(m, int):
        return Fraction(m)
    return m


def _r_series(moments, n):
    # h(w) = G(1/w) = sum m_k w^(k+1); its inverse is w = K(z)^-1 = z q(z)
    h = [moments[0] * 0] + list(moments[: n - 1])
    hinv = series.reversion(h, n)
    q = hinv[1:]
    # R(z) = z K(z) - 1 = 1/q(z) - 1
    r = series.reciprocal(q, n - 1)
    r[0] -= 1
    return r


def free_convolution_moments(moment_sequences, order: int):
    """Moments ``m_0, ..., m_order`` of the free sum of the given distributions.

    Each input sequence lists ``m_0 = 1, m_1, m_2, ...`` with at least
    ``order + 1`` entries.  Integer and Fraction inputs are processed in exact
    rational arithmetic.
    """
    if order > MOMENT_CAP:
        raise CapError(f"order {order} exceeds the internal cap {MOMENT_CAP}")
    if order < 0:
        raise InvalidInput("order must be nonnegative")
    if not moment_sequences:
        raise InvalidInput("need at least one moment sequence")
    n = order + 2
    total = None
    for seq in moment_sequences:
        seq = [_exactify(m) for m in seq]
        if len(seq) < order + 1:
            raise InvalidInput(f"need {order + 1} moments, got {len(seq)}")
        if seq[0] != 1:
            raise InvalidInput("moment sequences must start with m_0 = 1")
        r = _r_series(seq[: order + 1], n)
        total = r if total is None else [a + b for a, b in zip(total, r)]
    total[0] += 1
    q = series.reciprocal(total, n - 1)
    hinv = [q[0] * 0] + q
    h = series.reversion(hinv, n)
    return h[1: order + 2]
