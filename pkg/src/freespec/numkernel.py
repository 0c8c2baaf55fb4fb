"""
Shared numeric primitives.

Complex univariate polynomials with companion-matrix root finding, dense
eigenvalues, a damped Newton solver for small complex systems and a plain
bisection for sign changes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import (BracketError, InvalidInput, NoConvergence,
                     NumericFailure, SingularJacobian)

__all__ = [
    "ComplexPolynomial", "poly_roots", "eig_dense", "eig_dense_left",
    "NewtonProblem", "NewtonResult", "newton_solve", "bisect_crossing",
    "sort_spectrum",
]

COND_LIMIT = 1e14


def sort_spectrum(values):
    """Order complex numbers by modulus, then by argument in (-pi, pi]."""
    values = np.asarray(values, dtype=complex).ravel()
    # rounding the modulus makes numerically tied values compare equal
    keys = [(round(abs(v), 12), math.atan2(v.imag, v.real)) for v in values]
    order = sorted(range(len(values)), key=keys.__getitem__)
    return values[order]


@dataclass(frozen=True)
class ComplexPolynomial:
    """Polynomial with complex coefficients in ascending degree order.

    Trailing zero coefficients are dropped on construction.  The zero
    polynomial has ``degree == -1`` and ``is_zero`` set.
    """

    coefficients: tuple = ()

    def __post_init__(self):
        c = [complex(x) for x in self.coefficients]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coefficients", tuple(c))

    @classmethod
    def from_roots(cls, roots) -> "ComplexPolynomial":
        c = np.array([1.0 + 0j])
        for r in roots:
            c = np.convolve(c, [-complex(r), 1.0])
        return cls(tuple(c))

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        acc = 0j
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def derivative(self) -> "ComplexPolynomial":
        return ComplexPolynomial(tuple(k * c for k, c in enumerate(self.coefficients) if k))

    def error_scale(self, x) -> float:
        """Sum of |c_i| * max(1, |x|)**i, the natural size of p(x) rounding."""
        m = max(1.0, abs(x))
        return sum(abs(c) * m**i for i, c in enumerate(self.coefficients))


def _as_square(M) -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("matrix has non-finite entries")
    return A


def eig_dense(M) -> np.ndarray:
    """Eigenvalues of a dense complex square matrix.

    LAPACK ``geev`` with balancing; the result is ordered by modulus then
    argument so repeated calls are reproducible.
    """
    A = _as_square(M)
    if A.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    try:
        w = scipy.linalg.eigvals(A, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigensolver did not converge: {exc}") from exc
    return sort_spectrum(w)


def eig_dense_left(M):
    """Eigenvalues and left eigenvectors (columns ``v`` with ``v^T M = w v^T``)."""
    A = _as_square(M)
    try:
        w, vl = scipy.linalg.eig(A, left=True, right=False, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigensolver did not converge: {exc}") from exc
    # scipy returns vl with vl^H A = w vl^H
    return w, vl.conj()


def poly_roots(p: ComplexPolynomial, polish: bool = True) -> np.ndarray:
    """All roots of ``p`` (with multiplicity) via its companion matrix."""
    if not isinstance(p, ComplexPolynomial):
        p = ComplexPolynomial(tuple(p))
    if p.is_zero:
        raise InvalidInput("zero polynomial has no well-defined roots")
    if p.degree < 1:
        raise InvalidInput("constant polynomial has no roots")
    c = np.asarray(p.coefficients, dtype=complex)
    n = p.degree
    C = np.zeros((n, n), dtype=complex)
    C[1:, :-1] = np.eye(n - 1)
    C[:, -1] = -c[:-1] / c[-1]
    roots = eig_dense(C)
    if polish:
        dp = p.derivative()
        for k, r in enumerate(roots):
            for _ in range(3):
                d = dp(r)
                if d == 0:
                    break
                cand = r - p(r) / d
                if abs(p(cand)) < abs(p(r)):
                    r = cand
                else:
                    break
            roots[k] = r
    return sort_spectrum(roots)


@dataclass(frozen=True)
class NewtonProblem:
    """Square complex system ``residual(x) = 0``.

    ``jacobian`` may be omitted, in which case central finite differences
    are used (valid for holomorphic residuals).
    """

    residual: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    tol: float = 1e-12
    max_iterations: int = 50
    dimension: Optional[int] = None


@dataclass
class NewtonResult:
    x: np.ndarray
    iterations: int
    residual: float
    history: list = field(default_factory=list, repr=False)


def _fd_jacobian(F, x, fx):
    n = x.size
    J = np.empty((fx.size, n), dtype=complex)
    for j in range(n):
        h = 1e-7 * max(1.0, abs(x[j]))
        e = np.zeros(n, dtype=complex)
        e[j] = h
        J[:, j] = (np.asarray(F(x + e)) - np.asarray(F(x - e))) / (2 * h)
    return J


def newton_solve(problem: NewtonProblem, start) -> NewtonResult:
    """Damped Newton iteration.

    Each step is halved (at most 30 times) until the residual decreases.
    Raises SingularJacobian when the Jacobian condition number exceeds
    1e14 and NoConvergence when the iteration budget runs out.
    """
    F = problem.residual
    x = np.array(start, dtype=complex).ravel()
    if problem.dimension is not None and x.size != problem.dimension:
        raise InvalidInput(f"start has dimension {x.size}, expected {problem.dimension}")
    fx = np.asarray(F(x), dtype=complex).ravel()
    norm = np.max(np.abs(fx)) if fx.size else 0.0
    history = [norm]
    for it in range(problem.max_iterations + 1):
        if not np.isfinite(norm):
            raise NoConvergence("residual became non-finite")
        J = problem.jacobian(x) if problem.jacobian else _fd_jacobian(F, x, fx)
        J = np.asarray(J, dtype=complex).reshape(fx.size, x.size)
        if not np.all(np.isfinite(J)) or np.linalg.cond(J) > COND_LIMIT:
            raise SingularJacobian(f"ill-conditioned Jacobian at iteration {it}")
        if norm <= problem.tol:
            return NewtonResult(x, it, float(norm), history)
        if it == problem.max_iterations:
            break
        step = np.linalg.solve(J, fx)
        lam = 1.0
        for _ in range(31):
            trial = x - lam * step
            ft = np.asarray(F(trial), dtype=complex).ravel()
            nt = np.max(np.abs(ft))
            if np.isfinite(nt) and nt < norm:
                break
            lam *= 0.5
        else:
            raise NoConvergence(f"damping failed at iteration {it}, residual {norm:.3g}")
        x, fx, norm = trial, ft, nt
        history.append(norm)
    raise NoConvergence(f"no convergence after {problem.max_iterations} iterations, "
                        f"residual {norm:.3g}")


def _bisect(g, a, b, xtol, ga=None, gb=None):
    ga = g(a) if ga is None else ga
    gb = g(b) if gb is None else gb
    if not (np.isfinite(ga) and np.isfinite(gb)):
        raise BracketError("g is not finite at the bracket ends")
    if ga == 0:
        return a, a, ga, ga
    if gb == 0:
        return b, b, gb, gb
    if ga * gb > 0:
        raise BracketError(f"no sign change on [{a}, {b}]: g(a)={ga:.3g}, g(b)={gb:.3g}")
    while abs(b - a) > 2 * xtol:
        m = 0.5 * (a + b)
        gm = g(m)
        if not np.isfinite(gm):
            raise BracketError(f"g is not finite at {m}")
        if gm == 0:
            return m, m, gm, gm
        if (gm > 0) == (ga > 0):
            a, ga = m, gm
        else:
            b, gb = m, gm
    return a, b, ga, gb


def bisect_crossing(g: Callable[[float], float], a: float, b: float,
                    xtol: float = 1e-12) -> float:
    """Locate a sign change of ``g`` on ``[a, b]`` to within ``xtol``."""
    if xtol <= 0:
        raise InvalidInput("xtol must be positive")
    lo, hi, _, _ = _bisect(g, a, b, xtol)
    return 0.5 * (lo + hi)
