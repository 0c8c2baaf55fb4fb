"""
Truncated formal power series over any numeric field.

Coefficients are plain Python numbers, so ``Fraction`` inputs stay exact.
Only the handful of operations needed for R-transform arithmetic live here.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InvalidInput


def _zero(like):
    return like * 0


def mul(a, b, n):
    """Product of two series, truncated to ``n`` coefficients."""
    out = [_zero(a[0]) if a else 0] * n
    for i, ai in enumerate(a[:n]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: n - i]):
            out[i + j] += ai * bj
    return out


def reciprocal(a, n):
    """``1/a`` for a series with ``a[0] != 0``."""
    if not a or a[0] == 0:
        raise InvalidInput("series with zero constant term has no reciprocal")
    inv0 = Fraction(1) / a[0] if isinstance(a[0], (int, Fraction)) else 1 / a[0]
    out = [inv0]
    for k in range(1, n):
        acc = _zero(inv0)
        for j in range(1, min(k, len(a) - 1) + 1):
            acc += a[j] * out[k - j]
        out.append(-acc * inv0)
    return out


def compose(a, b, n):
    """``a(b(x))`` for ``b[0] == 0``, truncated to ``n`` terms (Horner)."""
    if b and b[0] != 0:
        raise InvalidInput("inner series must have zero constant term")
    out = [_zero(a[0])] * n
    for coef in reversed(a[:n]):
        out = mul(out, b, n)
        out[0] += coef
    return out


def derivative(a):
    return [k * c for k, c in enumerate(a)][1:]


def reversion(a, n):
    """Compositional inverse of ``a = x + a_2 x^2 + ...`` to ``n`` terms.

    Newton iteration ``g <- g - (a(g) - x) / a'(g)``, doubling the number of
    correct coefficients per pass.
    """
    if len(a) < 2 or a[0] != 0 or a[1] == 0:
        raise InvalidInput("reversion needs a[0] == 0 and a[1] != 0")
    one = a[1] / a[1]
    g = [_zero(one), one / a[1]]
    da = derivative(a)
    prec = 2
    while prec < n:
        prec = min(2 * prec, n)
        g = (g + [_zero(one)] * prec)[:prec]
        ag = compose(a, g, prec)
        ag[1] -= one
        dag = compose(da, g, prec) if len(da) > 1 else [da[0]] + [_zero(one)] * (prec - 1)
        corr = mul(ag, reciprocal(dag, prec), prec)
        g = [gi - ci for gi, ci in zip(g, corr)]
    return (g + [_zero(one)] * n)[:n]
