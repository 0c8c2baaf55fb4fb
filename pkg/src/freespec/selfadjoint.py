"""
Spectra of self-adjoint (and normal) models from the Cauchy transform.

The density comes from Stieltjes inversion, atoms from the residue of ``G``
and the spectrum itself from the points where the L2-norm of the resolvent
blows up.  The blow-up scan is a heuristic indicator: the exact statement
is about the closure of the set where the norm is infinite, which a finite
grid and a finite threshold can only approximate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateError, InvalidInput, NoConvergence, PoleError
from .numkernel import NewtonProblem, newton_solve

__all__ = [
    "DensitySample", "AtomReport", "cauchy", "density", "atom_mass", "atoms",
    "l2_resolvent_norm_sq", "k_resolvent_norm_sq", "inverse_cauchy",
    "blowup_scan", "DEFAULT_EPS_LADDER",
]

DEFAULT_EPS_LADDER = (1e-2, 1e-3, 1e-4)
ATOM_EPS_LADDER = (1e-6, 1e-7, 1e-8)
BLOWUP_THRESHOLD = 1e8


@dataclass(frozen=True)
class DensitySample:
    t: float
    eps_ladder: tuple
    values: tuple
    extrapolated: float


@dataclass(frozen=True)
class AtomReport:
    t: float
    mass: float


def cauchy(model, zeta) -> complex:
    """``G(zeta) = tau((zeta - T)^-1) = (1/zeta) f(1/zeta)``."""
    return model.cauchy(zeta)


def _check_ladder(eps_ladder):
    eps = tuple(float(e) for e in eps_ladder)
    if len(eps) < 2:
        raise InvalidInput("need at least two ladder values")
    if any(e <= 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
        raise InvalidInput("eps ladder must be positive and strictly decreasing")
    return eps


def _linear_extrapolate(eps, values):
    e1, e2 = eps[-2], eps[-1]
    v1, v2 = values[-2], values[-1]
    return v2 - e2 * (v1 - v2) / (e1 - e2)


def density(model, t: float, eps_ladder=DEFAULT_EPS_LADDER, clamp_tol=1e-9) -> DensitySample:
    """Stieltjes inversion ``-Im G(t + i eps) / pi`` extrapolated to eps = 0."""
    eps = _check_ladder(eps_ladder)
    values = tuple(float(-cauchy(model, complex(t, e)).imag / np.pi) for e in eps)
    ext = _linear_extrapolate(eps, values)
    if abs(ext) <= clamp_tol or (ext < 0 and abs(ext) <= 1e-6 * max(1.0, max(values))):
        ext = 0.0
    return DensitySample(float(t), eps, values, float(ext))


def atom_mass(model, t: float, eps_ladder=ATOM_EPS_LADDER, rel_tol=1e-3) -> float:
    """Mass of the atom at ``t``: limit of ``(zeta - t) G(zeta)``, ``zeta = t + i eps``.

    Returns 0 unless the ladder values settle to a positive constant.
    """
    eps = _check_ladder(eps_ladder)
    vals = []
    for e in eps:
        try:
            vals.append(e * abs(cauchy(model, complex(t, e))))
        except PoleError:
            return 0.0
    ext = _linear_extrapolate(eps, vals)
    if ext <= 1e-12 or abs(vals[-1] - vals[-2]) > rel_tol * abs(vals[-1]):
        return 0.0
    return float(min(max(ext, 0.0), 1.0))


def atoms(model, grid, min_mass=1e-6) -> list:
    """Atom candidates on a grid; neighbours of one atom are merged."""
    found = []
    for t in np.asarray(grid, dtype=float):
        mass = atom_mass(model, t)
        if mass > min_mass:
            if found and abs(found[-1].t - t) < 1e-9:
                continue
            found.append(AtomReport(float(t), mass))
    return found


def l2_resolvent_norm_sq(model, zeta) -> float:
    """``||(zeta - T)^-1||_2^2``.

    Self-adjoint models use ``-(G(zeta) - G(conj zeta)) / (zeta - conj zeta)``
    off the axis and ``-G'(zeta)`` on it; other models go through
    ``|1/zeta|^2 ||(1 - T/zeta)^-1||_2^2``.
    """
    zeta = complex(zeta)
    if getattr(model, "selfadjoint", False):
        if zeta.imag != 0:
            G, Gb = model.cauchy(zeta), model.cauchy(zeta.conjugate())
            return float((-(G - Gb) / (zeta - zeta.conjugate())).real)
        return float((-model.cauchy_prime(zeta)).real)
    if zeta == 0:
        raise PoleError("no generic formula at zeta = 0")
    return float(model.resolvent_l2_sq(1 / zeta) / abs(zeta) ** 2)


def k_resolvent_norm_sq(K: Callable, K_prime: Callable, z) -> float:
    """Squared resolvent norm at ``K(z)`` written through the inverse ``K`` of ``G``."""
    z = complex(z)
    if z.imag != 0:
        Kz = complex(K(z))
        den = Kz - Kz.conjugate()
        if den == 0:
            raise DegenerateError("K(z) is real although z is not")
        return float((-(z - z.conjugate()) / den).real)
    return float((-1 / complex(K_prime(z))).real)


def inverse_cauchy(model, z, seed=None):
    """``K(z)``, the inverse of ``G`` near infinity, and ``K'(z) = 1/G'(K(z))``."""
    z = complex(z)
    if z == 0:
        raise DegenerateError("K has a pole at z = 0")
    problem = NewtonProblem(lambda x: np.array([model.cauchy(x[0]) - z]),
                            lambda x: np.array([[model.cauchy_prime(x[0])]]),
                            tol=1e-15 * max(1.0, abs(z)), max_iterations=80)
    start = 1 / z if seed is None else seed
    try:
        zeta = complex(newton_solve(problem, [start]).x[0])
    except PoleError as exc:
        raise NoConvergence(str(exc)) from exc
    return zeta, 1 / model.cauchy_prime(zeta)


def blowup_scan(model, interval, step, threshold=BLOWUP_THRESHOLD) -> np.ndarray:
    """Grid points of ``interval`` where the resolvent L2-norm blows up.

    A point is flagged when the squared norm exceeds ``threshold`` or the
    model reports a singularity there.
    """
    if step <= 0:
        raise InvalidInput("step must be positive")
    a, b = map(float, interval)
    n = int(np.floor((b - a) / step + 1e-9))
    grid = a + step * np.arange(n + 1)
    flagged = []
    for t in grid:
        try:
            val = l2_resolvent_norm_sq(model, t)
        except (PoleError, ZeroDivisionError):
            flagged.append(t)
            continue
        if not np.isfinite(val) or val > threshold:
            flagged.append(t)
    return np.asarray(flagged)
