"""Scalar special functions used by the family constructors.

Bessel functions of real and purely imaginary order, exact Hermite and
Laguerre polynomials, the terminating Gauss hypergeometric sum and the
q-Pochhammer symbol with its q-integers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Union

from . import kernels
from .errors import DomainError, PoleError

Number = Union[int, float, Fraction]

__all__ = [
    "PolyCoeffs",
    "bessel_i",
    "bessel_ie",
    "bessel_k",
    "bessel_ke",
    "log_bessel_ke",
    "bessel_k_defining",
    "bessel_k_imag",
    "hermite",
    "laguerre",
    "hyp2f1_terminating",
    "q_pochhammer",
    "q_int",
    "q_factorial",
]


# ---------------------------------------------------------------- Bessel


def bessel_ie(nu: float, x: float) -> float:
    """Exponentially scaled ``exp(-x) I_nu(x)`` for ``x >= 0``."""
    if x < 0:
        raise DomainError(f"bessel_ie needs x >= 0, got {x}")
    nu = float(nu)
    if nu < 0 and nu != math.floor(nu):
        # reflection: I_{-a} = I_a + (2/pi) sin(a pi) K_a
        a = -nu
        if x == 0:
            return math.inf
        k = math.exp(log_bessel_ke(a, x) - 2.0 * x)
        return kernels.ive(a, float(x)) + 2.0 / math.pi * math.sin(a * math.pi) * k
    return kernels.ive(abs(nu), float(x))


def bessel_i(nu: float, x: float) -> float:
    """Modified Bessel function of the first kind ``I_nu(x)``, ``x >= 0``.

    Raises
    ------
    OverflowError
        If the value exceeds the double range.
    """
    v = bessel_ie(nu, x)
    if v == 0.0:
        return 0.0
    lv = math.log(abs(v)) + x
    if lv > 709.78:
        raise OverflowError(f"I_{nu}({x}) overflows double precision")
    return math.copysign(math.exp(lv), v)


def log_bessel_ke(nu: float, x: float) -> float:
    """``log(exp(x) K_nu(x))`` for ``x > 0``."""
    if not x > 0:
        raise DomainError(f"bessel_k needs x > 0, got {x}")
    return kernels.log_kve(float(nu), float(x), kernels.GL_NODES, kernels.GL_WEIGHTS)


def bessel_ke(nu: float, x: float) -> float:
    """Exponentially scaled ``exp(x) K_nu(x)``."""
    return math.exp(log_bessel_ke(nu, x))


def bessel_k(nu: float, x: float) -> float:
    """Modified Bessel function of the second kind ``K_nu(x)``, ``x > 0``.

    Evaluated from ``int_0^inf exp(-x cosh t) cosh(nu t) dt``, which is
    stable for every real order including integers.
    """
    lv = log_bessel_ke(nu, x) - x
    if lv > 709.78:
        raise OverflowError(f"K_{nu}({x}) overflows double precision")
    return math.exp(lv)


def _iv_raw_series(nu: float, x: float) -> float:
    # Plain power series, valid for any real order (1/Gamma vanishes at poles).
    h = 0.5 * x
    s = 0.0
    for k in range(400):
        g = k + nu + 1.0
        if g <= 0 and g == math.floor(g):
            continue
        term = h ** (2 * k) / (math.factorial(k) * math.gamma(g))
        s += term
        if k > 2 and abs(term) < 1e-18 * abs(s):
            break
    return s * h**nu


def _k_from_difference(nu: float, x: float) -> float:
    return 0.5 * math.pi * (_iv_raw_series(-nu, x) - _iv_raw_series(nu, x)) / math.sin(math.pi * nu)


def bessel_k_defining(nu: float, x: float, h: float = 0.04) -> float:
    """``K_nu(x)`` from ``(pi/2)(I_{-nu} - I_nu)/sin(pi nu)``.

    At integer order the removable singularity is resolved by symmetric
    offsets ``nu +- h/2^j`` combined in a three-level Richardson table.
    Loses roughly ``x / ln 10`` digits, so only suitable for small ``x``.
    """
    if not x > 0:
        raise DomainError(f"bessel_k needs x > 0, got {x}")
    n = round(nu)
    if abs(nu - n) > 1e-3:
        return _k_from_difference(nu, x)
    col = []
    for j in range(3):
        d = h / 2**j
        col.append(0.5 * (_k_from_difference(n + d, x) + _k_from_difference(n - d, x)))
    r1 = [(4 * col[i + 1] - col[i]) / 3 for i in range(2)]
    return (16 * r1[1] - r1[0]) / 15


def bessel_k_imag(u: float, a: float) -> float:
    """``K_{iu}(a) = int_0^inf exp(-a cosh t) cos(u t) dt`` for ``a > 0``.

    For ``u > 6/pi`` the contour is moved to ``Im t = pi/2 - 3/u`` which
    removes the ``exp(u pi / 2)`` cancellation of the real-axis integral.
    """
    if not a > 0:
        raise DomainError(f"bessel_k_imag needs a > 0, got {a}")
    return kernels.bessel_k_imag_kernel(float(u), float(a), kernels.GL_NODES, kernels.GL_WEIGHTS)


# ------------------------------------------------------------ polynomials


@dataclass(frozen=True)
class PolyCoeffs:
    """Polynomial with exact coefficients in ascending degree."""

    coefficients: tuple

    def __post_init__(self):
        c = list(self.coefficients)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coefficients", tuple(c) if c else (0,))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x: Number) -> Number:
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __len__(self) -> int:
        return len(self.coefficients)

    def __getitem__(self, i: int) -> Number:
        return self.coefficients[i]

    def __eq__(self, other) -> bool:
        if isinstance(other, PolyCoeffs):
            return self.coefficients == other.coefficients
        return tuple(other) == self.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def astype_float(self) -> list[float]:
        return [float(c) for c in self.coefficients]


def _poly_sub(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]


def hermite(n: int) -> PolyCoeffs:
    """Physicists' Hermite polynomial ``H_n`` (``H_1 = 2x``, ``H_2 = 4x^2 - 2``)."""
    if n < 0:
        raise DomainError("hermite degree must be >= 0")
    prev, cur = [1], [0, 2]
    if n == 0:
        return PolyCoeffs((1,))
    for k in range(1, n):
        # H_{k+1} = 2x H_k - 2k H_{k-1}
        nxt = _poly_sub([0] + [2 * c for c in cur], [2 * k * c for c in prev])
        prev, cur = cur, nxt
    return PolyCoeffs(tuple(cur))


def laguerre(n: int, alpha: Number) -> PolyCoeffs:
    """Generalized Laguerre polynomial ``L_n^(alpha)`` by its recurrence.

    Rational ``alpha`` gives exact ``Fraction`` coefficients.
    """
    if n < 0:
        raise DomainError("laguerre degree must be >= 0")
    al = Fraction(alpha) if isinstance(alpha, (int, Rational)) else alpha
    prev = [Fraction(1) if isinstance(al, Fraction) else 1.0]
    if n == 0:
        return PolyCoeffs(tuple(prev))
    cur = [1 + al, -prev[0]]
    for k in range(1, n):
        # (k+1) L_{k+1} = (2k+1+alpha-x) L_k - (k+alpha) L_{k-1}
        a = [(2 * k + 1 + al) * c for c in cur]
        xb = [0] + list(cur)
        t = _poly_sub(_poly_sub(a, xb), [(k + al) * c for c in prev])
        nxt = [c / (k + 1) for c in t]
        prev, cur = cur, nxt
    return PolyCoeffs(tuple(cur))


# ---------------------------------------------------------- hypergeometric


def hyp2f1_terminating(n: int, b: Number, c: Number, z: Number) -> Number:
    """``2F1(-n, b; c; z)`` as the finite sum of ``n + 1`` terms.

    Exact when all of ``b, c, z`` are rational.

    Raises
    ------
    PoleError
        If ``c`` is one of ``0, -1, ..., -(n-1)``.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    for k in range(n):
        if c + k == 0:
            raise PoleError(f"c = {c} makes (c)_{k + 1} vanish before the series terminates")
    exact = all(isinstance(v, (int, Rational)) for v in (b, c, z))
    if not exact:
        return kernels.hyp2f1_term_sum(int(n), float(b), float(c), float(z))
    t = Fraction(1)
    s = Fraction(1)
    for k in range(n):
        t *= Fraction((-n + k) * (b + k), (c + k) * (k + 1)) * z
        s += t
    return s


# -------------------------------------------------------------- q-series


def q_pochhammer(a: float, q: float, n: int | float | None = None) -> float:
    """``(a; q)_n = prod_{k<n} (1 - a q^k)``; ``n=None`` or ``inf`` for the infinite product.

    The infinite product stops once ``|a q^k| < 1e-16`` (at most ``10**5`` factors).
    """
    if n is None or n == math.inf:
        if not abs(q) < 1:
            raise DomainError("infinite q-Pochhammer needs |q| < 1")
        return kernels.qpoch(float(a), float(q), -1)
    n = int(n)
    if n < 0:
        raise DomainError("n must be >= 0")
    return kernels.qpoch(float(a), float(q), n)


def q_int(n: int, q: Number) -> Number:
    """q-integer ``[n]_q = 1 + q + ... + q^(n-1)``."""
    s = 0 * q
    t = 1 + 0 * q
    for _ in range(n):
        s += t
        t *= q
    return s


def q_factorial(n: int, q: Number) -> Number:
    """q-factorial ``[n]_q! = [1]_q ... [n]_q``."""
    r = 1 + 0 * q
    for k in range(1, n + 1):
        r *= q_int(k, q)
    return r
