"""
Catalog of operator models that can be summed freely.

Each model exposes the analytic data consumed by the resolvent criterion:
the moment generating function ``f(s) = tau((1 - sT)^-1)``, its derivative,
the squared L2-norm of ``(1 - sT)^-1`` and the Cauchy transform.

Models
------
Cyclic(m)
    Generator ``u`` of Z_m in the reduced group C*-algebra, ``u^m = 1``.
ArcsineShift
    ``u + u*`` for a Haar unitary ``u``; arcsine law on [-2, 2].
Rotated(base, phase)
    ``phase * T`` for ``T`` a base model, ``|phase| = 1``.
MomentSeries(moments, bound)
    Self-adjoint operator given by finitely many moments and a norm bound.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateError, InvalidInput, PoleError

__all__ = [
    "OperatorModel", "Cyclic", "ArcsineShift", "Rotated", "MomentSeries",
    "FreeSumModel", "mgf", "mgf_prime", "resolvent_l2_sq", "x_value",
    "parse_model", "format_model", "total_norm_bound",
]

# below this |Im s| the self-adjoint norm formula switches to f + s f'
_REAL_AXIS_EPS = 1e-8


class OperatorModel:
    """Base class; subclasses are frozen dataclasses."""

    norm_bound: float
    selfadjoint: bool = False

    def mgf(self, s: complex) -> complex:
        raise NotImplementedError

    def mgf_prime(self, s: complex) -> complex:
        raise NotImplementedError

    def resolvent_l2_sq(self, s: complex) -> float:
        """``||(1 - sT)^-1||_2^2``; default uses the self-adjoint formula."""
        if not self.selfadjoint:
            raise InvalidInput(f"{format_model(self)} has no L2 resolvent formula")
        s = complex(s)
        if abs(s.imag) < _REAL_AXIS_EPS:
            # evaluate on the real axis to stay off the cut
            r = s.real
            return float((self.mgf(r) + r * self.mgf_prime(r)).real)
        sb = s.conjugate()
        val = (sb * self.mgf(sb) - s * self.mgf(s)) / (sb - s)
        return float(val.real)

    def moment_sequence(self, order: int) -> list:
        """``tau(T^k)`` for ``k = 0..order``, exact where possible."""
        raise NotImplementedError

    def cauchy(self, zeta: complex) -> complex:
        zeta = complex(zeta)
        if zeta == 0:
            raise PoleError("Cauchy transform at 0 has no generic limit for this model")
        return self.mgf(1 / zeta) / zeta

    def cauchy_prime(self, zeta: complex) -> complex:
        zeta = complex(zeta)
        if zeta == 0:
            raise PoleError("Cauchy transform at 0 has no generic limit for this model")
        s = 1 / zeta
        # G(zeta) = s f(s), ds/dzeta = -s^2
        return -(s * s) * (self.mgf(s) + s * self.mgf_prime(s))


@dataclass(frozen=True)
class Cyclic(OperatorModel):
    m: int = 2

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise InvalidInput(f"cyclic order must be an integer >= 2, got {self.m}")

    norm_bound = 1.0

    @property
    def selfadjoint(self):
        return self.m == 2

    def _denominator(self, s):
        d = 1 - complex(s) ** self.m
        if abs(d) < 1e-14:
            raise PoleError(f"s^{self.m} = 1 at s = {s}")
        return d

    def mgf(self, s):
        return 1 / self._denominator(s)

    def mgf_prime(self, s):
        s = complex(s)
        d = self._denominator(s)
        return self.m * s ** (self.m - 1) / (d * d)

    def moment_sequence(self, order):
        return [1 if k % self.m == 0 else 0 for k in range(order + 1)]

    def resolvent_l2_sq(self, s):
        s = complex(s)
        d = self._denominator(s)
        a2 = abs(s) ** 2
        return float(sum(a2**j for j in range(self.m)) / abs(d) ** 2)

    def cauchy(self, zeta):
        zeta = complex(zeta)
        d = zeta**self.m - 1
        if abs(d) < 1e-14:
            raise PoleError(f"zeta = {zeta} is an atom of Cyclic({self.m})")
        return zeta ** (self.m - 1) / d

    def cauchy_prime(self, zeta):
        zeta = complex(zeta)
        m = self.m
        d = zeta**m - 1
        if abs(d) < 1e-14:
            raise PoleError(f"zeta = {zeta} is an atom of Cyclic({m})")
        return ((m - 1) * zeta ** (m - 2) * d - m * zeta ** (2 * m - 2)) / (d * d)


@dataclass(frozen=True)
class ArcsineShift(OperatorModel):
    """``u + u*`` with ``u`` Haar unitary; ``f(s) = 1/sqrt(1 - 4 s^2)``.

    The principal square root puts the cut exactly on the real rays
    ``|s| >= 1/2``, i.e. on ``1/s`` in the spectrum [-2, 2].
    """

    norm_bound = 2.0
    selfadjoint = True

    def _root(self, s):
        s = complex(s)
        w = 1 - 4 * s * s
        if s.imag == 0 and abs(s.real) >= 0.5:
            raise PoleError(f"s = {s} lies on the cut |s| >= 1/2")
        return cmath.sqrt(w)

    def mgf(self, s):
        return 1 / self._root(s)

    def moment_sequence(self, order):
        # central binomial coefficients: number of closed walks on Z
        return [math.comb(k, k // 2) if k % 2 == 0 else 0 for k in range(order + 1)]

    def mgf_prime(self, s):
        s = complex(s)
        r = self._root(s)
        return 4 * s / (r * r * r)

    def cauchy(self, zeta):
        zeta = complex(zeta)
        if zeta.imag == 0 and abs(zeta.real) <= 2:
            raise PoleError(f"zeta = {zeta} lies in the spectrum [-2, 2]")
        return self.mgf(1 / zeta) / zeta


@dataclass(frozen=True)
class Rotated(OperatorModel):
    """``phase * base``; ``f(s) = f_base(phase * s)``."""

    base: OperatorModel = ArcsineShift()
    phase: complex = 1j

    def __post_init__(self):
        if abs(abs(complex(self.phase)) - 1) > 1e-12:
            raise InvalidInput(f"phase must have modulus 1, got {self.phase}")
        object.__setattr__(self, "phase", complex(self.phase))

    @property
    def norm_bound(self):
        return self.base.norm_bound

    @property
    def selfadjoint(self):
        return self.base.selfadjoint and self.phase.imag == 0

    def mgf(self, s):
        return self.base.mgf(self.phase * complex(s))

    def mgf_prime(self, s):
        return self.phase * self.base.mgf_prime(self.phase * complex(s))

    def resolvent_l2_sq(self, s):
        return self.base.resolvent_l2_sq(self.phase * complex(s))

    def moment_sequence(self, order):
        base = self.base.moment_sequence(order)
        if self.phase in (1, -1):
            p = int(self.phase.real)
            return [p**k * m for k, m in enumerate(base)]
        return [self.phase**k * m for k, m in enumerate(base)]

    def cauchy(self, zeta):
        return self.base.cauchy(complex(zeta) / self.phase) / self.phase

    def cauchy_prime(self, zeta):
        return self.base.cauchy_prime(complex(zeta) / self.phase) / (self.phase * self.phase)


@dataclass(frozen=True)
class MomentSeries(OperatorModel):
    """Self-adjoint model known through moments ``m_0 = 1, m_1, ..., m_{N-1}``.

    Only usable for ``|s| <= 0.5 / bound``, where the truncation error of
    the series is at most ``N * (|s| * bound)**N``.
    """

    moments: tuple = (1.0,)
    bound: float = 1.0

    def __post_init__(self):
        mom = tuple(complex(m) for m in self.moments)
        if not mom or abs(mom[0] - 1) > 1e-12:
            raise InvalidInput("moment sequence must start with m_0 = 1")
        if self.bound < 0:
            raise InvalidInput("norm bound must be nonnegative")
        object.__setattr__(self, "moments", mom)

    @property
    def norm_bound(self):
        return float(self.bound)

    @property
    def selfadjoint(self):
        return all(abs(m.imag) <= 1e-14 * max(1.0, abs(m)) for m in self.moments)

    @property
    def radius(self):
        return np.inf if self.bound == 0 else 0.5 / self.bound

    def moment_sequence(self, order):
        if order >= len(self.moments):
            raise InvalidInput(f"only {len(self.moments)} moments are known")
        return [m.real if m.imag == 0 else m for m in self.moments[: order + 1]]

    def truncation_error(self, s):
        n = len(self.moments)
        return n * (abs(s) * self.bound) ** n

    def _check(self, s):
        if abs(s) > self.radius:
            raise PoleError(f"|s| = {abs(s):.3g} outside the series domain {self.radius:.3g}")

    def mgf(self, s):
        s = complex(s)
        self._check(s)
        acc = 0j
        for m in reversed(self.moments):
            acc = acc * s + m
        return acc

    def mgf_prime(self, s):
        s = complex(s)
        self._check(s)
        acc = 0j
        for k in range(len(self.moments) - 1, 0, -1):
            acc = acc * s + k * self.moments[k]
        return acc

    def cauchy(self, zeta):
        zeta = complex(zeta)
        if zeta == 0:
            raise PoleError("Cauchy transform of a moment series is undefined at 0")
        return self.mgf(1 / zeta) / zeta


@dataclass(frozen=True)
class FreeSumModel:
    summands: tuple

    def __post_init__(self):
        if not self.summands:
            raise InvalidInput("a free sum needs at least one summand")
        object.__setattr__(self, "summands", tuple(self.summands))

    @property
    def norm_bound(self):
        return sum(m.norm_bound for m in self.summands)

    def __iter__(self):
        return iter(self.summands)

    def __len__(self):
        return len(self.summands)

    def __str__(self):
        return format_model(self)


def total_norm_bound(models) -> float:
    if isinstance(models, OperatorModel):
        return models.norm_bound
    return sum(m.norm_bound for m in models)


def mgf(model, s):
    return model.mgf(s)


def mgf_prime(model, s):
    return model.mgf_prime(s)


def resolvent_l2_sq(model, s):
    return model.resolvent_l2_sq(s)


def x_value(model, s) -> float:
    """Squared L2-norm of the normalized centered resolvent.

    ``x = ||(1 - sT)^-1||_2^2 / |f(s)|^2 - 1``; for Cyclic(m) this is
    ``|s|^2 + ... + |s|^(2m-2)`` and is evaluated in that form.
    """
    if isinstance(model, Cyclic):
        model._denominator(s)
        a2 = abs(complex(s)) ** 2
        return float(sum(a2**j for j in range(1, model.m)))
    f = model.mgf(s)
    if f == 0:
        raise DegenerateError(f"f(s) = 0 at s = {s}")
    x = model.resolvent_l2_sq(s) / abs(f) ** 2 - 1
    # rounding can push an exactly-zero norm slightly negative
    return max(float(x), 0.0)


# ---------------------------------------------------------------------------
# model-string grammar:  cyclic:<m> | arcsine | rot:<re>,<im>:(<model>)
#                        | series:[m1,m2,...]:<bound>, joined by '+'


def _split_top(text, sep="+"):
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise InvalidInput(f"unbalanced brackets in {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise InvalidInput(f"unbalanced brackets in {text!r}")
    parts.append("".join(cur))
    return parts


def _parse_one(token: str) -> OperatorModel:
    token = token.strip()
    if m := re.fullmatch(r"cyclic:(\d+)", token):
        return Cyclic(int(m.group(1)))
    if token == "arcsine":
        return ArcsineShift()
    if m := re.fullmatch(r"rot:([^,:]+),([^,:]+):\((.*)\)", token):
        try:
            phase = complex(float(m.group(1)), float(m.group(2)))
        except ValueError as exc:
            raise InvalidInput(f"bad rotation phase in {token!r}") from exc
        inner = _split_top(m.group(3))
        if len(inner) != 1:
            raise InvalidInput("rotation applies to a single model")
        return Rotated(_parse_one(inner[0]), phase)
    if m := re.fullmatch(r"series:\[([^\]]*)\]:([^:]+)", token):
        try:
            tail = [complex(x.replace("i", "j")) for x in m.group(1).split(",") if x.strip()]
            bound = float(m.group(2))
        except ValueError as exc:
            raise InvalidInput(f"bad moment series {token!r}") from exc
        return MomentSeries(tuple([1.0] + tail), bound)
    raise InvalidInput(f"unrecognized model {token!r}")


def parse_model(text: str) -> FreeSumModel:
    """Parse a model string such as ``cyclic:2+cyclic:3``."""
    if not text or not text.strip():
        raise InvalidInput("empty model string")
    return FreeSumModel(tuple(_parse_one(t) for t in _split_top(text.strip())))


def _fmt_num(x) -> str:
    x = complex(x)
    if x.imag == 0:
        return repr(x.real)
    return f"{x.real!r}{'+' if x.imag >= 0 else '-'}{abs(x.imag)!r}i"


def format_model(model) -> str:
    """Inverse of :func:`parse_model`."""
    if isinstance(model, (FreeSumModel, list, tuple)):
        return "+".join(format_model(m) for m in model)
    if isinstance(model, Cyclic):
        return f"cyclic:{model.m}"
    if isinstance(model, ArcsineShift):
        return "arcsine"
    if isinstance(model, Rotated):
        return f"rot:{model.phase.real!r},{model.phase.imag!r}:({format_model(model.base)})"
    if isinstance(model, MomentSeries):
        return f"series:[{','.join(_fmt_num(m) for m in model.moments[1:])}]:{model.bound!r}"
    raise InvalidInput(f"cannot format {model!r}")
