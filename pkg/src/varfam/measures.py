"""Variance-function descriptors, measures and family members."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterator, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import DomainError, InvariantError, NonConvergenceError
from .harness.numerics import IntegralResult, integrate, sum_series

__all__ = [
    "VarianceSpec",
    "ContinuousMeasure",
    "DiscreteMeasure",
    "MixedMeasure",
    "Measure",
    "FamilyMember",
    "MomentReport",
]


def _exact(x):
    return Fraction(x) if isinstance(x, (int, Rational)) else x


def _binomial_half_series(c: float, order: int) -> list:
    """Coefficients of ``(1 + c t)**(1/2)`` up to ``t**order``."""
    out = [Fraction(1)]
    coef = Fraction(1)
    for k in range(1, order + 1):
        coef = coef * (Fraction(1, 2) - (k - 1)) / k
        out.append(coef * (_exact(c) ** k))
    return out


KINDS = ("quadratic", "eps", "rational_minus", "rational_plus", "sqrt_one_minus", "arcsine", "series")


@dataclass(frozen=True)
class VarianceSpec:
    """Variance function ``V(m) = v(m)/lam`` on the mean domain ``(A, B)``.

    ``kind`` selects the form of ``v``:

    ``quadratic``      ``params = (c0, c1, c2)``, ``v = c0 + c1 m + c2 m^2``
    ``eps``            ``params = (a, b, c, eps)``, ``v = (a m^2 + b m + c) sqrt(1 + eps m^2)``
    ``rational_minus`` ``v = m/(1-m)``
    ``rational_plus``  ``v = m/(1+m)``
    ``sqrt_one_minus`` ``v = m sqrt(1-m)``
    ``arcsine``        ``v = sqrt(1-m^2)``
    ``series``         ``params`` are Taylor coefficients of ``v`` at 0
    """

    kind: str
    params: tuple = ()
    domain: tuple = (-math.inf, math.inf)
    lam: Union[float, Fraction] = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvariantError(f"unknown variance kind {self.kind!r}")
        if not self.lam > 0:
            raise InvariantError("scale lam must be positive")
        lo, hi = self.domain
        if not lo < hi:
            raise InvariantError("mean domain must be a nonempty interval")
        for m in self.sample_means(9):
            v = self.v(m)
            if not v > 0:
                raise InvariantError(f"variance function is not positive at m={m}: {v}")

    # -- constructors
    @classmethod
    def quadratic(cls, c0=1, c1=0, c2=0, domain=None, lam=1) -> "VarianceSpec":
        if domain is None:
            domain = _positive_interval_around_zero(c0, c1, c2)
        return cls("quadratic", (c0, c1, c2), domain, lam)

    @classmethod
    def eps_deformed(cls, a, b, c, eps, domain=(-math.inf, math.inf), lam=1) -> "VarianceSpec":
        return cls("eps", (a, b, c, eps), domain, lam)

    @classmethod
    def from_series(cls, coeffs: Sequence, domain=None, lam=1) -> "VarianceSpec":
        coeffs = tuple(coeffs)
        if domain is None:
            domain = (-1e-3, 1e-3) if coeffs and coeffs[0] else (0.0, 1e-3)
        return cls("series", coeffs, domain, lam)

    # -- evaluation
    def v(self, m: float) -> float:
        """Unscaled variance function ``v(m)``."""
        k, p = self.kind, self.params
        if k == "quadratic":
            return p[0] + p[1] * m + p[2] * m * m
        if k == "eps":
            a, b, c, eps = p
            return (a * m * m + b * m + c) * math.sqrt(1 + eps * m * m)
        if k == "rational_minus":
            return m / (1 - m)
        if k == "rational_plus":
            return m / (1 + m)
        if k == "sqrt_one_minus":
            return m * math.sqrt(1 - m)
        if k == "arcsine":
            return math.sqrt(1 - m * m)
        s = 0.0
        for c in reversed(p):
            s = s * m + float(c)
        return s

    def __call__(self, m: float) -> float:
        """Scaled variance ``V(m) = v(m)/lam``."""
        return self.v(m) / float(self.lam)

    def contains(self, m: float) -> bool:
        return self.domain[0] < m < self.domain[1]

    def sample_means(self, n: int = 5) -> list[float]:
        lo, hi = self.domain
        lo_f = max(lo, -10.0) if math.isinf(lo) else lo
        hi_f = min(hi, 10.0) if math.isinf(hi) else hi
        if self.kind == "series":
            lo_f, hi_f = lo, hi
        return [lo_f + (hi_f - lo_f) * (i + 1) / (n + 1) for i in range(n)]

    def series(self, order: int) -> list:
        """Taylor coefficients of ``V = v/lam`` at 0 up to ``order``.

        Exact ``Fraction`` coefficients when all parameters are rational.
        """
        k, p = self.kind, self.params
        if k == "quadratic":
            base = [_exact(c) for c in p]
        elif k == "series":
            base = [_exact(c) for c in p]
            if len(base) < order + 1 and any(base):
                base = base + [0 * base[0]] * (order + 1 - len(base))
        elif k == "eps":
            a, b, c, eps = (_exact(x) for x in p)
            root = [0] * (order + 1)
            half = _binomial_half_series(eps, order // 2 + 1)
            for j, h in enumerate(half):
                if 2 * j <= order:
                    root[2 * j] = h
            poly = [c, b, a]
            base = [sum(poly[i] * root[n - i] for i in range(3) if 0 <= n - i) for n in range(order + 1)]
        elif k == "rational_minus":
            base = [Fraction(0)] + [Fraction(1)] * order
        elif k == "rational_plus":
            base = [Fraction(0)] + [Fraction((-1) ** (j - 1)) for j in range(1, order + 1)]
        elif k == "sqrt_one_minus":
            half = _binomial_half_series(-1, order)
            base = [Fraction(0)] + half[:order]
        else:  # arcsine
            half = _binomial_half_series(-1, order // 2 + 1)
            base = [Fraction(0)] * (order + 1)
            for j, h in enumerate(half):
                if 2 * j <= order:
                    base[2 * j] = h
        base = list(base[: order + 1])
        base += [0 * base[0]] * (order + 1 - len(base))
        lam = _exact(self.lam)
        return [c / lam for c in base]

    def scaled(self, factor) -> "VarianceSpec":
        """Same variance function with ``lam`` multiplied by ``factor``."""
        return replace(self, lam=_exact(self.lam) * _exact(factor))


def _positive_interval_around_zero(c0, c1, c2) -> tuple:
    if not c0 > 0:
        raise InvariantError("quadratic variance needs V(0) > 0 for the default domain")
    c0, c1, c2 = float(c0), float(c1), float(c2)
    roots = np.roots([c2, c1, c0]) if c2 != 0 else (np.array([-c0 / c1]) if c1 != 0 else np.array([]))
    real = [float(r.real) for r in np.atleast_1d(roots) if abs(complex(r).imag) < 1e-14]
    lo = max([r for r in real if r < 0], default=-math.inf)
    hi = min([r for r in real if r > 0], default=math.inf)
    return (lo, hi)


# ------------------------------------------------------------------ measures


@dataclass(frozen=True)
class ContinuousMeasure:
    """Density ``u -> density(u)`` on ``support``.

    ``core(tol)`` returns a finite interval outside which the mass of
    ``(1 + u^2) |density|`` is below ``tol``.  ``alg`` marks a density
    ``smooth(u) (u-lo)^alg[0] (hi-u)^alg[1]`` with ``smooth`` supplied.
    ``log_variable`` integrates in ``t = log u`` (positive supports).
    """

    density: Callable[[float], float]
    support: tuple
    points: tuple = ()
    core: Optional[Callable[[float], tuple]] = None
    smooth: Optional[Callable[[float], float]] = None
    alg: Optional[tuple] = None
    log_variable: bool = False

    def integrate(self, f: Optional[Callable[[float], float]] = None, tol: float = 1e-10) -> IntegralResult:
        """``int f(u) density(u) du`` (``f = 1`` when omitted)."""
        if self.alg is not None:
            g = self.smooth if f is None else (lambda u: f(u) * self.smooth(u))
            return integrate(g, self.support, tol, alg=self.alg)
        lo, hi = self.support
        tail = 0.0
        if self.core is not None:
            lo, hi = self.core(0.05 * tol)
            tail = 0.05 * tol
        if self.log_variable:
            dens = self.density
            if f is None:
                g = lambda t: dens(math.exp(t)) * math.exp(t)
            else:
                g = lambda t: f(math.exp(t)) * dens(math.exp(t)) * math.exp(t)
            pts = [math.log(p) for p in self.points if p > 0]
            return integrate(g, (math.log(lo) if lo > 0 else -math.inf, math.log(hi)), tol, points=pts, tail=tail)
        g = self.density if f is None else (lambda u: f(u) * self.density(u))
        return integrate(g, (lo, hi), tol, points=self.points, tail=tail)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Atoms at ``locations`` with ``masses``; ``tail_bound`` bounds the truncated mass.

    ``approximate`` marks a quadrature rule standing in for a measure that
    is only known through its moments.
    """

    locations: np.ndarray
    masses: np.ndarray
    tail_bound: float = 0.0
    approximate: bool = False

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=float)
        mass = np.asarray(self.masses, dtype=float)
        if loc.shape != mass.shape:
            raise InvariantError("locations and masses must have equal length")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "masses", mass)

    def atoms(self) -> Iterator[tuple[float, float]]:
        return zip(self.locations.tolist(), self.masses.tolist())

    def __len__(self) -> int:
        return len(self.masses)

    def integrate(self, f: Optional[Callable[[float], float]] = None, tol: float = 1e-10) -> IntegralResult:
        if self.tail_bound > tol:
            raise NonConvergenceError(f"atom tail bound {self.tail_bound:.3g} exceeds {tol:.3g}")
        if f is None:
            vals = self.masses
        else:
            vals = self.masses * np.array([f(u) for u in self.locations.tolist()], dtype=float)
        return IntegralResult(math.fsum(vals.tolist()), self.tail_bound)


@dataclass(frozen=True)
class MixedMeasure:
    """Absolutely continuous part plus a finite list of atoms."""

    continuous: ContinuousMeasure
    discrete: DiscreteMeasure

    def integrate(self, f: Optional[Callable[[float], float]] = None, tol: float = 1e-10) -> IntegralResult:
        a = self.continuous.integrate(f, tol)
        b = self.discrete.integrate(f, tol)
        return IntegralResult(a.value + b.value, a.error + b.error)


Measure = Union[ContinuousMeasure, DiscreteMeasure, MixedMeasure]


@dataclass(frozen=True)
class FamilyMember:
    """One law ``W_lam(m, .)`` of a family.

    ``variance`` is the target ``V(m)/lam`` that the moments should reproduce.
    ``probability`` is ``False`` for signed constructions kept as
    counterexamples.  ``density`` gives pointwise weight evaluation as a
    function of ``(m, u)`` so that the mean-derivative identities can be
    checked.
    """

    family: str
    measure: Measure
    mean: float
    lam: float
    variance: float
    params: Mapping = field(default_factory=dict)
    probability: bool = True
    spec: Optional[VarianceSpec] = None
    metadata: Mapping = field(default_factory=dict)


@dataclass(frozen=True)
class MomentReport:
    mass: float
    mean: float
    variance: float
    tolerance: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.mass, self.mean, self.variance)


def moments_of(measure: Measure, tol: float = 1e-10) -> MomentReport:
    """Mass, mean and central second moment of any measure."""
    if isinstance(measure, DiscreteMeasure):
        if measure.tail_bound > tol:
            raise NonConvergenceError(f"atom tail bound {measure.tail_bound:.3g} exceeds {tol:.3g}")
        m0, m1, m2 = sum_series((measure.locations, measure.masses), tol, measure.tail_bound)
        return MomentReport(m0, m1, m2, tol)
    m0 = measure.integrate(None, tol).value
    m1 = measure.integrate(lambda u: u, tol).value
    m2 = measure.integrate(lambda u: (u - m1) ** 2, tol).value
    return MomentReport(m0, m1, m2, tol)


def check_domain(cond: bool, message: str) -> None:
    if not cond:
        raise DomainError(message)
