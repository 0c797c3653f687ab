"""q-exponential families with quadratic variance for ``-1 < q < 1``.

The weight is an infinite product in the mean, and the generating measure
is the orthogonality measure of the Al-Salam-Chihara polynomials.  That
measure has no closed form for ``q != 0``; it is represented here by its
Jacobi matrix, from which moments and Gauss quadrature rules follow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .errors import DegenerateCaseError, DomainError, InsufficientOrderError, InvariantError
from .harness.numerics import largest_valid_interval, q_derivative
from .measures import DiscreteMeasure, FamilyMember, VarianceSpec
from .specfun import PolyCoeffs, q_factorial, q_int

__all__ = [
    "QExpParams",
    "OrthoPolySystem",
    "q_derivative",
    "q_weight",
    "asc_system",
    "moments_from_jacobi",
    "generating_check",
    "support_interval",
    "admissible_interval",
    "q_family",
]


def _is_rational(*xs) -> bool:
    return all(isinstance(x, (int, Rational)) for x in xs)


@dataclass(frozen=True)
class QExpParams:
    """Parameters of ``V(m) = 1 + a m + b m^2`` at deformation ``q``.

    Requires ``b > -1 + max(q, 0)``.  The values ``b = -1/[N]_q`` give
    measures on ``N + 1`` points and are rejected with
    :class:`DegenerateCaseError`.
    """

    q: float
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        q, b = self.q, self.b
        if not -1 < q < 1:
            raise InvariantError("q must lie in (-1, 1)")
        if q >= 0:
            qi = 0.0
            t = 1.0
            for n in range(1, 2000):
                qi += t
                t *= q
                if abs(b + 1.0 / qi) < 1e-12:
                    raise DegenerateCaseError(
                        f"b = -1/[{n}]_q selects a measure on {n + 1} points; that case is not implemented"
                    )
                if 1.0 / qi - (1 - q) < 1e-15:
                    break
        if not b > -1 + max(q, 0):
            raise InvariantError(f"need b > -1 + max(q, 0); got b={b}, q={q}")

    @property
    def spec(self) -> VarianceSpec:
        return VarianceSpec("quadratic", (1, self.a, self.b), admissible_interval(self))

    def variance(self, m: float) -> float:
        return 1 + self.a * m + self.b * m * m


def q_weight(params: QExpParams, m: float, u: float) -> float:
    """``prod_k (1 + a m q^k + b m^2 q^2k) / (1 + (a-(1-q)u) m q^k + (b+1-q) m^2 q^2k)``.

    Raises
    ------
    DomainError
        If a denominator factor is not positive.
    """
    val, ok = kernels.asc_weight(float(params.q), float(params.a), float(params.b), float(m), float(u))
    if not ok:
        raise DomainError(f"denominator factor nonpositive at m={m}, u={u}; m is outside the admissible interval")
    return val


@dataclass(frozen=True)
class OrthoPolySystem:
    """Monic recurrence ``p_{n+1} = (x - alpha_n) p_n - beta_n p_{n-1}``.

    ``alpha`` and ``beta`` are fully materialized tuples of length ``N+1``
    (``beta[0] = 0``).  ``standardized`` holds the rescaled parameters of
    the Askey-Wilson normal form.
    """

    alpha: tuple
    beta: tuple
    standardized: dict = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return len(self.alpha) - 1

    def polynomials(self, n: int) -> list[PolyCoeffs]:
        if n > self.depth + 1:
            raise InsufficientOrderError(f"system has {self.depth + 1} rows, need {n}")
        one = 1 if isinstance(self.alpha[0], (int, Rational)) else 1.0
        out = [[one]]
        if n >= 1:
            out.append([-self.alpha[0], one])
        for k in range(1, n):
            cur, prev = out[k], out[k - 1]
            nxt = [0 * one] + list(cur)
            for i, c in enumerate(cur):
                nxt[i] -= self.alpha[k] * c
            for i, c in enumerate(prev):
                nxt[i] -= self.beta[k] * c
            out.append(nxt)
        return [PolyCoeffs(tuple(p)) for p in out[: n + 1]]

    def jacobi_matrix(self, size: int) -> np.ndarray:
        if size > self.depth + 1:
            raise InsufficientOrderError(f"system has {self.depth + 1} rows, need {size}")
        j = np.diag([float(a) for a in self.alpha[:size]])
        off = np.sqrt([float(b) for b in self.beta[1:size]])
        return j + np.diag(off, 1) + np.diag(off, -1)

    def gauss_rule(self, size: int) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights of the ``size``-point Gauss rule (Golub-Welsch)."""
        vals, vecs = np.linalg.eigh(self.jacobi_matrix(size))
        return vals, vecs[0, :] ** 2


def asc_system(params: QExpParams, order: int) -> OrthoPolySystem:
    """Recurrence coefficients ``alpha_n = a [n]_q``, ``beta_n = (1 + b [n-1]_q) [n]_q``.

    Exact ``Fraction`` coefficients when ``q, a, b`` are rational.
    """
    q, a, b = params.q, params.a, params.b
    if _is_rational(q, a, b):
        q, a, b = Fraction(q), Fraction(a), Fraction(b)
    alpha = tuple(a * q_int(n, q) for n in range(order + 1))
    beta = [0 * q]
    for n in range(1, order + 1):
        bn = (1 + b * q_int(n - 1, q)) * q_int(n, q)
        if bn < 0:
            raise InvariantError(f"beta_{n} = {bn} is negative")
        beta.append(bn)
    qf, af, bf = float(params.q), float(params.a), float(params.b)
    std = {
        "alpha": math.sqrt(bf + 1 - qf) / math.sqrt(1 - qf),
        "beta": af / (1 - qf),
        "a_tilde": -af / (math.sqrt(1 - qf) * math.sqrt(bf + 1 - qf)),
        "b_tilde": bf / (bf + 1 - qf),
    }
    return OrthoPolySystem(alpha, tuple(beta), std)


def moments_from_jacobi(system: OrthoPolySystem, n: int):
    """``n``-th moment ``(J^n)_{00}`` of the orthogonality measure (exact for rational input)."""
    size = n // 2 + 1
    if system.depth + 1 < size:
        raise InsufficientOrderError(f"need {size} recurrence rows for moment {n}")
    zero = 0 * system.alpha[0]
    v = [zero] * size
    v[0] = 1 + zero
    for _ in range(n):
        # monic Jacobi operator: (Jv)_i = v_{i-1} + alpha_i v_i + beta_{i+1} v_{i+1}
        w = []
        for i in range(size):
            s = system.alpha[i] * v[i]
            if i > 0:
                s += v[i - 1]
            if i + 1 < size:
                s += system.beta[i + 1] * v[i + 1]
            w.append(s)
        v = w
    return v[0]


def generating_check(params: QExpParams, m: float, u: float, order: int) -> float:
    """``|w(m,u) - sum_{n<=order} m^n p_n(u) / [n]_q!|``."""
    if m == 0:
        return 0.0
    sys = asc_system(QExpParams(float(params.q), float(params.a), float(params.b)), order)
    polys = sys.polynomials(order)
    s = 0.0
    for n, p in enumerate(polys):
        s += m**n * float(p(u)) / q_factorial(n, float(params.q))
    return abs(q_weight(params, m, u) - s)


def support_interval(params: QExpParams) -> tuple[float, float]:
    """``a/(1-q) -+ 2 sqrt(b+1-q)/(1-q)``."""
    q, a, b = float(params.q), float(params.a), float(params.b)
    if not b + 1 - q > 0:
        raise InvariantError("need b + 1 - q > 0")
    c = a / (1 - q)
    r = 2 * math.sqrt(b + 1 - q) / (1 - q)
    return (c - r, c + r)


def _factors_positive(q: float, a: float, b: float, m: float, us: Sequence[float]) -> bool:
    if not 1 + a * m + b * m * m > 0:
        return False
    for u in us:
        _, ok = kernels.asc_weight(q, a, b, m, u)
        if not ok:
            return False
    mk = m
    for _ in range(400):
        if not 1 + a * mk + b * mk * mk > 0:
            return False
        mk *= q
        if abs(mk) < 1e-17:
            break
    return True


def admissible_interval(params: QExpParams, nodes: int = 120) -> tuple[float, float]:
    """Largest interval around 0 where the weight defines a probability law.

    Two conditions are imposed.  Every product factor must stay positive;
    the denominators are affine in ``u``, so it suffices to test the extreme
    points of the support interval and of the Gauss nodes (which carry any
    atoms).  And ``|m| < 1/sqrt(b+1-q)``: past that point the pole of the
    leading factor, at ``u = (1 + a m + (b+1-q) m^2)/((1-q) m)``, turns back
    after touching the support edge and the mass identity no longer holds
    although the factors stay positive.
    """
    q, a, b = float(params.q), float(params.a), float(params.b)
    lo, hi = support_interval(params)
    x, _ = asc_system(QExpParams(q, a, b), nodes).gauss_rule(nodes)
    us = (min(lo, float(x.min())), max(hi, float(x.max())))
    lo_m, hi_m = largest_valid_interval(lambda m: _factors_positive(q, a, b, m, us))
    radius = 1.0 / math.sqrt(b + 1 - q)
    return (max(lo_m, -radius), min(hi_m, radius))


def q_family(params: QExpParams, m: float, nodes: int = 200) -> FamilyMember:
    """Member ``w(m, u) mu(du)`` with ``mu`` replaced by its ``nodes``-point Gauss rule.

    The rule integrates the analytic weight to near machine precision; the
    resulting measure is flagged ``approximate``.
    """
    q, a, b = float(params.q), float(params.a), float(params.b)
    sys = asc_system(QExpParams(q, a, b), nodes)
    x, g = sys.gauss_rule(nodes)
    w = np.array([q_weight(params, m, u) for u in x.tolist()])
    return FamilyMember(
        family="q_exponential",
        measure=DiscreteMeasure(x, g * w, approximate=True),
        mean=m,
        lam=1.0,
        variance=params.variance(m),
        params={"q": q, "a": a, "b": b},
        metadata={"weight": lambda mm, u: q_weight(params, mm, u), "q": q},
    )

