"""Free exponential families: free-Meixner laws, Cauchy transforms and free cumulants."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Sequence

import numpy as np

from .classical import lagrange_coefficients
from .errors import DomainError, InsufficientOrderError
from .harness.numerics import largest_valid_interval
from .measures import ContinuousMeasure, DiscreteMeasure, FamilyMember, MixedMeasure, VarianceSpec

__all__ = [
    "FreeMeixnerLaw",
    "FreeCumulantSeq",
    "free_meixner",
    "cauchy_transform",
    "g2v_residual",
    "free_weight",
    "free_family",
    "free_admissible_interval",
    "free_cumulants",
    "free_power",
]


@dataclass(frozen=True)
class FreeMeixnerLaw:
    """Free-Meixner law with parameters ``(a, b)``, ``b > -1``.

    Density ``sqrt(4(1+b) - (u-a)^2) / (2 pi (b u^2 + a u + 1))`` on
    ``ac_support`` plus at most two atoms ``(location, mass)``.
    """

    a: float
    b: float
    ac_support: tuple
    atoms: tuple = ()

    def density(self, u: float) -> float:
        lo, hi = self.ac_support
        if not lo < u < hi:
            return 0.0
        a, b = self.a, self.b
        return math.sqrt(4 * (1 + b) - (u - a) ** 2) / (2 * math.pi * (b * u * u + a * u + 1))

    @cached_property
    def _endpoint_form(self):
        # density = smooth(u) (u-lo)^e0 (hi-u)^e1; a root of b u^2 + a u + 1 at an
        # endpoint lowers that exponent from 1/2 to -1/2
        lo, hi = self.ac_support
        coeffs = [self.b, self.a, 1.0]  # descending
        scale = 1.0
        exps = [0.5, 0.5]
        for idx, e in ((0, lo), (1, hi)):
            if len(coeffs) > 1 and abs(np.polyval(coeffs, e)) < 1e-12 * (1 + abs(e)) ** 2:
                quot, _ = np.polydiv(coeffs, [1.0, -e])
                coeffs = list(quot)
                exps[idx] = -0.5
                if idx == 1:
                    scale = -scale
        return tuple(exps), coeffs, scale

    @property
    def alg(self) -> tuple:
        return self._endpoint_form[0]

    def smooth(self, u: float) -> float:
        """Density divided by ``(u - lo)^alg[0] (hi - u)^alg[1]``."""
        _, coeffs, scale = self._endpoint_form
        return 1.0 / (2 * math.pi * scale * float(np.polyval(coeffs, u)))

    def measure(self) -> MixedMeasure:
        cont = ContinuousMeasure(self.density, self.ac_support, smooth=self.smooth, alg=self.alg)
        loc = np.array([u for u, _ in self.atoms], dtype=float)
        mass = np.array([p for _, p in self.atoms], dtype=float)
        return MixedMeasure(cont, DiscreteMeasure(loc, mass))

    def ac_mass(self, tol: float = 1e-12) -> float:
        return self.measure().continuous.integrate(None, tol).value

    def total_mass(self, tol: float = 1e-12) -> float:
        return self.measure().integrate(None, tol).value

    def moment(self, n: int, tol: float = 1e-12) -> float:
        """``n``-th moment; ``tol`` is relative to ``max |u|^n`` on the support."""
        reach = max([abs(x) for x in self.ac_support] + [abs(u) for u, _ in self.atoms] + [1.0])
        return self.measure().integrate(lambda u: u**n, tol * reach**n).value


def free_meixner(a: float, b: float) -> FreeMeixnerLaw:
    """Free-Meixner law generating the free family with ``V(m) = 1 + a m + b m^2``.

    Atom cases: ``b = 0, a^2 > 1`` one atom at ``-1/a``; ``b > 0, a^2 > 4b``
    one atom; ``b < 0`` two atoms.  All atom masses are clamped at 0 and
    zero-mass atoms are dropped; at ``a^2 = 4b`` there is no atom.
    """
    if not b > -1:
        raise DomainError("free_meixner needs b > -1")
    r = 2 * math.sqrt(1 + b)
    support = (a - r, a + r)
    atoms = []
    if b == 0:
        if a * a > 1:
            atoms.append((-1 / a, 1 - 1 / (a * a)))
    elif b > 0:
        if a * a > 4 * b:
            d = math.sqrt(a * a - 4 * b)
            p1 = max(0.0, 1 - (abs(a) - d) / (2 * b * d))
            u1 = -math.copysign(1.0, a) * (abs(a) - d) / (2 * b)
            atoms.append((u1, p1))
    else:
        d = math.sqrt(a * a - 4 * b)
        atoms.append(((-a + d) / (2 * b), max(0.0, 1 + (d - a) / (2 * b * d))))
        atoms.append(((-a - d) / (2 * b), max(0.0, 1 + (d + a) / (2 * b * d))))
    atoms = tuple((u, p) for u, p in atoms if p > 0)
    return FreeMeixnerLaw(a, b, support, atoms)


def cauchy_transform(a: float, b: float, z: float) -> float:
    """``G(z) = (a + z + 2bz - sqrt((a-z)^2 - 4(1+b))) / (2(1 + a z + b z^2))``.

    The root takes the sign of ``z - a`` so that ``G(z) ~ 1/z`` at infinity.
    """
    disc = (a - z) ** 2 - 4 * (1 + b)
    if disc < 0 or (a - 2 * math.sqrt(1 + b) <= z <= a + 2 * math.sqrt(1 + b)):
        raise DomainError(f"z={z} lies on the support of the free-Meixner law")
    den = 2 * (1 + a * z + b * z * z)
    if abs(den) < 1e-14:
        raise DomainError(f"z={z} is a pole of the Cauchy transform")
    root = math.copysign(math.sqrt(disc), z - a)
    return (a + z + 2 * b * z - root) / den


def _quadratic_coeffs(spec: VarianceSpec) -> tuple[float, float, float]:
    if spec.kind != "quadratic":
        raise DomainError("a quadratic variance function is required")
    c0, c1, c2 = (float(c) / float(spec.lam) for c in spec.params)
    if c0 != 1:
        raise DomainError("the free-Meixner normal form needs V(0) = 1")
    return c0, c1, c2


def g2v_residual(spec: VarianceSpec, m: float) -> float:
    """``|G(m + V(m)/m) - m/V(m)|`` for quadratic ``V``."""
    if m == 0:
        raise DomainError("m must be nonzero")
    _, a, b = _quadratic_coeffs(spec)
    v = spec(m)
    return abs(cauchy_transform(a, b, m + v / m) - m / v)


def free_weight(spec: VarianceSpec, m: float, u: float) -> float:
    """``V(m) / (V(m) + m (m - u))``."""
    v = spec(m)
    den = v + m * (m - u)
    if not den > 0:
        raise DomainError(f"V(m) + m(m-u) = {den} is not positive at m={m}, u={u}")
    return v / den


def free_admissible_interval(a: float, b: float) -> tuple[float, float]:
    """Means for which the free weight is positive on the support and the atoms.

    Also bounded by ``|m| < 1/sqrt(1+b)``, the principal branch of
    ``z = m + V(m)/m``.
    """
    law = free_meixner(a, b)
    us = list(law.ac_support) + [u for u, _ in law.atoms]

    def ok(m):
        v = 1 + a * m + b * m * m
        return v > 0 and all(v + m * (m - u) > 0 for u in us)

    lo, hi = largest_valid_interval(ok)
    radius = 1.0 / math.sqrt(1 + b)
    return (max(lo, -radius), min(hi, radius))


def free_family(a: float, b: float, m: float) -> FamilyMember:
    """Member ``V(m)/(V(m) + m(m-u)) mu(du)`` with ``mu`` the free-Meixner law."""
    law = free_meixner(a, b)
    spec = VarianceSpec("quadratic", (1, a, b), free_admissible_interval(a, b))
    if not spec.contains(m):
        raise DomainError(f"m={m} outside the admissible interval {spec.domain}")
    v = spec(m)

    def tilt(u):
        return v / (v + m * (m - u))

    cont = ContinuousMeasure(
        lambda u: law.density(u) * tilt(u),
        law.ac_support,
        smooth=lambda u: law.smooth(u) * tilt(u),
        alg=law.alg,
    )
    loc = np.array([u for u, _ in law.atoms], dtype=float)
    mass = np.array([p * tilt(u) for u, p in law.atoms], dtype=float)
    return FamilyMember(
        family="free",
        measure=MixedMeasure(cont, DiscreteMeasure(loc, mass)),
        mean=m,
        lam=1.0,
        variance=v,
        params={"a": a, "b": b},
        spec=spec,
        metadata={"weight": lambda mm, u: free_weight(spec, mm, u), "q": 0.0, "law": law},
    )


@dataclass(frozen=True)
class FreeCumulantSeq:
    """Free cumulants ``k[1..N]``."""

    k: dict = field(default_factory=dict)

    def __getitem__(self, n: int):
        return self.k[n]

    def as_list(self) -> list:
        return [self.k[n] for n in sorted(self.k)]


def free_cumulants(spec: VarianceSpec, order: int) -> FreeCumulantSeq:
    """Free cumulants ``k_1 = 0`` and ``k_{n+1} = (1/n) [t^(n-1)] V(t)^n`` up to ``k_order``.

    Exact for rational coefficients.

    Raises
    ------
    InsufficientOrderError
        If a ``series`` spec carries fewer than ``order - 1`` coefficients.
    """
    if order < 1:
        raise DomainError("order must be >= 1")
    need = max(order - 2, 0)
    if spec.kind == "series" and len(spec.params) < need + 1:
        raise InsufficientOrderError(f"cumulant k_{order} needs V to order {need}, got {len(spec.params) - 1}")
    coeffs = spec.series(max(need, 0))
    one = 1 if isinstance(coeffs[0], Fraction) else 1.0
    c = lagrange_coefficients([0 * one, one], coeffs, order - 1)
    k = {1: 0 * one}
    for n in range(1, order):
        k[n + 1] = c[n]
    return FreeCumulantSeq(k)


def free_power(spec: VarianceSpec, lam: float) -> VarianceSpec:
    """Variance function ``V/lam`` of the dilated free convolution power, ``lam >= 1``."""
    if lam < 1:
        raise DomainError(
            "free_power needs lam >= 1: powers below 1 exist only for freely infinitely divisible generators"
        )
    return spec.scaled(lam)
