"""Truncated power series over exact or extended-precision coefficients.

A series is a plain list ``[c0, c1, ..., cN]``.  Coefficients may be
``int``/``Fraction`` (exact) or ``mpmath.mpf`` (extended precision); the
helpers never convert between the two.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Sequence

import mpmath

from .errors import InsufficientOrderError

EXTENDED_DPS = 50


def is_exact(coeffs: Sequence) -> bool:
    return all(isinstance(c, (int, Rational)) for c in coeffs)


def coerce(coeffs: Sequence) -> list:
    """Exact inputs become ``Fraction``; anything else becomes ``mpf``."""
    if is_exact(coeffs):
        return [Fraction(c) for c in coeffs]
    return [mpmath.mpf(c) if not isinstance(c, Fraction) else mpmath.mpf(c.numerator) / c.denominator for c in coeffs]


def pad(a: Sequence, order: int) -> list:
    """Coefficients ``0..order``; raises if ``a`` is too short and not finite."""
    out = list(a[: order + 1])
    zero = 0 * a[0] if len(a) else 0
    out.extend([zero] * (order + 1 - len(out)))
    return out


def mul(a: Sequence, b: Sequence, order: int) -> list:
    a = pad(a, order)
    b = pad(b, order)
    out = []
    for n in range(order + 1):
        s = 0 * a[0]
        for k in range(n + 1):
            if a[k] and b[n - k]:
                s += a[k] * b[n - k]
        out.append(s)
    return out


def power(a: Sequence, n: int, order: int) -> list:
    """``a**n`` truncated at ``order`` by binary exponentiation."""
    one = 1 + 0 * a[0]
    result = [one] + [0 * one] * order
    base = pad(a, order)
    while n:
        if n & 1:
            result = mul(result, base, order)
        n >>= 1
        if n:
            base = mul(base, base, order)
    return result


def deriv(a: Sequence) -> list:
    return [k * a[k] for k in range(1, len(a))] or [0 * a[0]]


def exp(a: Sequence, order: int) -> list:
    """``exp(a)`` for a series; the constant term must vanish unless inputs are mpf."""
    a = pad(a, order)
    if a[0]:
        if isinstance(a[0], (int, Rational)):
            raise ValueError("exp of a series with a nonzero rational constant term is not rational")
        c0 = mpmath.exp(a[0])
    else:
        c0 = 1 + 0 * a[0]
    e = [c0]
    for n in range(1, order + 1):
        s = 0 * c0
        for k in range(1, n + 1):
            if a[k]:
                s += k * a[k] * e[n - k]
        e.append(s / n)
    return e


def coefficient(a: Sequence, n: int):
    if n >= len(a):
        raise InsufficientOrderError(f"series has order {len(a) - 1}, coefficient {n} requested")
    return a[n]
