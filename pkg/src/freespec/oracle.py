"""
Exact arithmetic in group algebras of free products of cyclic groups.

A group ``Z_{n_0} * ... * Z_{n_{k-1}}`` is given by its tuple of orders.
Reduced words are tuples of letters ``(factor, exponent)`` with adjacent
letters from distinct factors and ``1 <= exponent < n_factor``; the empty
tuple is the identity.  Word length counts letters (syllables), so in
``Z_2 * Z_3`` the words ``v`` and ``v^2`` both have length 1.
"""

from __future__ import annotations

import numbers
from collections import defaultdict
from fractions import Fraction
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from .errors import CapacityError, InvalidInput

__all__ = [
    "GroupWord", "AlgebraElement", "word_concat", "algebra_mul",
    "trace_moment", "ball_operator", "ball_words", "generator",
    "cyclic_resolvent",
]

GroupWord = Tuple[Tuple[int, int], ...]

TERM_CAP = 10**7
BALL_CAP = 4000
MAX_MOMENT_ORDER = 24


def _check_group(orders):
    orders = tuple(int(n) for n in orders)
    if not orders or any(n < 2 for n in orders):
        raise InvalidInput(f"factor orders must be >= 2, got {orders}")
    return orders


def word_concat(w1: GroupWord, w2: GroupWord, orders: Sequence[int]) -> GroupWord:
    """Reduced form of ``w1 * w2``; letters merge and cancel across the seam."""
    out = list(w1)
    for k, (fac, exp) in enumerate(w2):
        if out and out[-1][0] == fac:
            e = (out[-1][1] + exp) % orders[fac]
            out.pop()
            if e:
                out.append((fac, e))
                out.extend(w2[k + 1:])
                return tuple(out)
            # full cancellation: the next letter of w2 meets a new neighbour
        else:
            out.append((fac, exp))
            out.extend(w2[k + 1:])
            return tuple(out)
    return tuple(out)


def word_key(w: GroupWord):
    """Deterministic order: length, then letters lexicographically."""
    return (len(w), w)


class AlgebraElement:
    """Finitely supported combination of group words.

    Coefficients are ordinary Python numbers; with ``int``/``Fraction``
    inputs all arithmetic stays exact (``exact`` reports which mode is in
    use).  The trace is the coefficient of the identity and words are
    orthonormal for the trace inner product.
    """

    __slots__ = ("orders", "terms")

    def __init__(self, orders, terms=None):
        self.orders = _check_group(orders)
        self.terms: Dict[GroupWord, numbers.Number] = {}
        for w, c in (terms or {}).items():
            if c != 0:
                self.terms[tuple(w)] = c

    @classmethod
    def identity(cls, orders, coef=1):
        return cls(orders, {(): coef})

    @property
    def exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for c in self.terms.values())

    def trace(self):
        return self.terms.get((), 0)

    def l2_norm_sq(self):
        return sum(abs(c) ** 2 for c in self.terms.values())

    def __len__(self):
        return len(self.terms)

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: word_key(kv[0]))

    def _coerce(self, other):
        if isinstance(other, AlgebraElement):
            if other.orders != self.orders:
                raise InvalidInput("elements live in different groups")
            return other
        return AlgebraElement.identity(self.orders, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = defaultdict(int, self.terms)
        for w, c in other.terms.items():
            terms[w] += c
        return AlgebraElement(self.orders, terms)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.orders, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return algebra_mul(self, other)
        return AlgebraElement(self.orders, {w: c * other for w, c in self.terms.items()})

    def __rmul__(self, other):
        return AlgebraElement(self.orders, {w: other * c for w, c in self.terms.items()})

    def __truediv__(self, other):
        return AlgebraElement(self.orders, {w: c / other for w, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            other = self._coerce(other)
        return self.orders == other.orders and self.terms == other.terms

    def max_deviation(self, other) -> float:
        """Largest coefficient difference ``max_w |self_w - other_w|``."""
        diff = self - other
        return max((abs(c) for c in diff.terms.values()), default=0.0)

    def __repr__(self):
        body = " + ".join(f"{c!r}*{_fmt_word(w)}" for w, c in self.items()[:8])
        more = " + ..." if len(self.terms) > 8 else ""
        return f"AlgebraElement({self.orders}, {body or '0'}{more})"


def _fmt_word(w):
    if not w:
        return "e"
    return "".join(f"g{f}^{e}" for f, e in w)


def algebra_mul(A: AlgebraElement, B: AlgebraElement) -> AlgebraElement:
    """Product in the group algebra (bilinear extension of word_concat)."""
    if A.orders != B.orders:
        raise InvalidInput("elements live in different groups")
    if len(A.terms) * len(B.terms) > TERM_CAP:
        raise CapacityError(f"product would touch {len(A.terms) * len(B.terms)} term pairs")
    orders = A.orders
    out = defaultdict(int)
    for wa, ca in A.terms.items():
        for wb, cb in B.terms.items():
            out[word_concat(wa, wb, orders)] += ca * cb
    if len(out) > TERM_CAP:
        raise CapacityError(f"product has {len(out)} terms")
    return AlgebraElement(orders, out)


def generator(orders, factor: int, power: int = 1, coef=1) -> AlgebraElement:
    orders = _check_group(orders)
    e = power % orders[factor]
    return AlgebraElement(orders, {((factor, e),) if e else (): coef})


def cyclic_resolvent(orders, factor: int, s) -> AlgebraElement:
    """``(1 - s u)^-1 = (1 + s u + ... + s^(m-1) u^(m-1)) / (1 - s^m)``."""
    orders = _check_group(orders)
    m = orders[factor]
    d = 1 - s**m
    if d == 0:
        raise InvalidInput(f"s^{m} = 1: 1 - s u is not invertible")
    terms = {(): 1 / d if not isinstance(d, (int, Fraction)) else Fraction(1) / d}
    for j in range(1, m):
        terms[((factor, j),)] = s**j / d
    return AlgebraElement(orders, terms)


def trace_moment(orders, p: int):
    """``tau((u_0 + ... + u_{k-1})^p)`` by repeated exact multiplication."""
    orders = _check_group(orders)
    if p < 0:
        raise InvalidInput("order must be nonnegative")
    if p > MAX_MOMENT_ORDER:
        raise CapacityError(f"moment order {p} exceeds {MAX_MOMENT_ORDER}")
    gens = AlgebraElement(orders, {((i, 1),): 1 for i in range(len(orders))})
    acc = AlgebraElement.identity(orders)
    for _ in range(p):
        acc = algebra_mul(acc, gens)
    return acc.trace()


def ball_words(orders, L: int) -> list:
    """All reduced words of length ``<= L`` in (length, lexicographic) order."""
    orders = _check_group(orders)
    layer = [()]
    words = [()]
    for _ in range(L):
        nxt = []
        for w in layer:
            for f, n in enumerate(orders):
                if w and w[-1][0] == f:
                    continue
                for e in range(1, n):
                    nxt.append(w + ((f, e),))
                    if len(words) + len(nxt) > BALL_CAP:
                        raise CapacityError(f"ball of radius {L} exceeds {BALL_CAP} words")
        nxt.sort()
        words.extend(nxt)
        layer = nxt
    return words


def ball_operator(orders, weights, L: int) -> np.ndarray:
    """Left multiplication by ``sum_i w_i u_i`` compressed to the ball of radius L.

    Entry ``[i, j]`` is the coefficient of word ``i`` in ``(sum w u) * word_j``;
    products leaving the ball are dropped, so this is a finite section
    usable for lower bounds only.
    """
    orders = _check_group(orders)
    if len(weights) != len(orders):
        raise InvalidInput("need one weight per factor")
    words = ball_words(orders, L)
    index = {w: i for i, w in enumerate(words)}
    M = np.zeros((len(words), len(words)), dtype=complex)
    for j, w in enumerate(words):
        for f, wt in enumerate(weights):
            if wt == 0:
                continue
            img = word_concat(((f, 1),), w, orders)
            i = index.get(img)
            if i is not None:
                M[i, j] += wt
    return M
