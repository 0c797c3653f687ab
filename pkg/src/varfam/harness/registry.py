"""Catalogue of the constructible families with default parameters.

Each entry knows how to build a member, how to evaluate its weight
pointwise, which mean interval to sample and which mean-derivative
identity its weight satisfies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from .. import classical, freefam, qbig, qfam
from ..errors import DomainError
from ..measures import FamilyMember, VarianceSpec

__all__ = ["FamilyEntry", "Counterexample", "FAMILIES", "COUNTEREXAMPLES", "get_family"]


@dataclass(frozen=True)
class FamilyEntry:
    """One constructible family.

    ``ode`` is ``("d", None, None)`` for the ordinary derivative,
    ``("q", q, None)`` for the q-derivative and ``("hahn", q, theta)`` for
    the Hahn operator; ``q`` may be a callable of the parameters.
    """

    name: str
    build: Callable[..., FamilyMember]
    weight: Callable[..., float]
    defaults: Mapping[str, float]
    domain: Callable[..., tuple]
    ode: Optional[tuple] = None
    description: str = ""

    def params(self, overrides: Optional[Mapping[str, float]] = None) -> dict:
        p = dict(self.defaults)
        for k, v in (overrides or {}).items():
            if k not in p:
                raise DomainError(f"family {self.name!r} has no parameter {k!r}; expected {sorted(p)}")
            p[k] = v
        return p

    def m_grid(self, params: Mapping[str, float], n: int = 5, lo: float | None = None, hi: float | None = None) -> list[float]:
        """``n`` interior points of the sampled mean interval (or of ``[lo, hi]``)."""
        a, b = self.domain(**params)
        if lo is None or hi is None:
            return [a + (b - a) * (i + 1) / (n + 1) for i in range(n)]
        if not (a < lo and hi < b):
            raise DomainError(f"m-grid [{lo}, {hi}] leaves the mean domain ({a}, {b}) of {self.name}")
        if n == 1:
            return [0.5 * (lo + hi)]
        return [lo + (hi - lo) * i / (n - 1) for i in range(n)]

    def ode_rule(self, params: Mapping[str, float]) -> Optional[tuple]:
        if self.ode is None:
            return None
        kind, q, theta = self.ode
        return kind, (q(params) if callable(q) else q), theta


@dataclass(frozen=True)
class Counterexample:
    """Signed construction whose failure of positivity is certified by a witness."""

    name: str
    find_witness: Callable[..., Optional[tuple]]
    defaults: Mapping[str, float] = field(default_factory=dict)
    description: str = ""


def _scaled_interval(lo: float, hi: float, frac: float = 0.8) -> tuple:
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo) * frac
    return (c - h, c + h)


def _q_domain(q, a, b):
    lo, hi = qfam.admissible_interval(qfam.QExpParams(q, a, b))
    return _scaled_interval(lo, hi)


def _free_domain(a, b):
    lo, hi = freefam.free_admissible_interval(a, b)
    return _scaled_interval(lo, hi)


def _qinf_domain(lam, generator):
    # 1 + lam m u >= 0 on the support: |m| <= 1/(lam r)
    r = 1 / math.sqrt(lam) if generator == 0 else 2 / math.sqrt(lam)
    return (-0.8 / (lam * r), 0.8 / (lam * r))


def _qinf_generator(lam, generator):
    return qbig.two_point_generator(lam) if generator == 0 else qbig.semicircle_generator(lam)


def _qinf_weight(lam, generator, m, u):
    return 1 + lam * m * u


FAMILIES: dict[str, FamilyEntry] = {
    e.name: e
    for e in [
        FamilyEntry(
            "eps_gaussian",
            lambda lam, eps, m: classical.eps_gaussian(lam, eps, m),
            lambda lam, eps, m, u: classical.eps_gaussian(lam, eps, m).metadata["weight"](m, u),
            {"lam": 1.0, "eps": 1.0},
            lambda lam, eps: (-1.0, 1.0),
            ("d", None, None),
            "continuous, v(m) = (1 + eps m^2)^(3/2)",
        ),
        FamilyEntry(
            "eps_gamma",
            lambda lam, eps, m: classical.eps_gamma(lam, eps, m),
            lambda lam, eps, m, u: classical.eps_gamma(lam, eps, m).metadata["weight"](m, u),
            {"lam": 2.0, "eps": 1.0},
            lambda lam, eps: (0.25, 2.0),
            ("d", None, None),
            "continuous on (0, inf), v(m) = m^2 sqrt(1 + eps m^2)",
        ),
        FamilyEntry(
            "eps_poisson",
            lambda lam, eps, m: classical.eps_poisson(lam, eps, m),
            lambda lam, eps, m, u: classical.eps_poisson_weight(lam, eps, m, int(round(u * lam))),
            {"lam": 1.0, "eps": 1.0},
            lambda lam, eps: (0.1, 2.0),
            ("d", None, None),
            "atoms at n/lam, v(m) = m sqrt(1 + eps m^2)",
        ),
        FamilyEntry(
            "eps_gauss_discrete",
            lambda lam, eps, m: classical.eps_gauss_discrete(lam, eps, m),
            lambda lam, eps, m, u: classical.eps_gauss_discrete(lam, eps, m).metadata["weight"](m, u),
            {"lam": 1.0, "eps": 1.0},
            lambda lam, eps: (-1.0, 1.0),
            ("d", None, None),
            "lattice sqrt(eps)/lam Z, v(m) = sqrt(1 + eps m^2)",
        ),
        FamilyEntry(
            "rational",
            lambda lam, m: classical.rational_family(lam, m),
            lambda lam, m, u: classical.rational_family(lam, m).metadata["weight"](m, u),
            {"lam": 1.0},
            lambda lam: (0.05, 0.55),
            ("d", None, None),
            "atoms at n/lam, v(m) = m/(1-m)",
        ),
        FamilyEntry(
            "q_exponential",
            lambda q, a, b, m: qfam.q_family(qfam.QExpParams(q, a, b), m),
            lambda q, a, b, m, u: qfam.q_weight(qfam.QExpParams(q, a, b), m, u),
            {"q": 0.5, "a": 0.2, "b": 0.1},
            _q_domain,
            ("q", lambda p: p["q"], None),
            "w(m, u) mu(du) with V(m) = 1 + a m + b m^2, |q| < 1",
        ),
        FamilyEntry(
            "free",
            lambda a, b, m: freefam.free_family(a, b, m),
            lambda a, b, m, u: freefam.free_weight(VarianceSpec.quadratic(1, a, b), m, u),
            {"a": 0.3, "b": 0.2},
            _free_domain,
            ("q", 0.0, None),
            "free-Meixner tilt, V(m) = 1 + a m + b m^2",
        ),
        FamilyEntry(
            "q_laguerre",
            lambda p, lam, m: qbig.q_laguerre_family(qbig.PParams(p, lam), m),
            lambda p, lam, m, u: qbig.q_laguerre_continuous(qbig.PParams(p, lam), m, u),
            {"p": 0.5, "lam": 1.5},
            lambda p, lam: (0.25, 2.0),
            ("q", lambda prm: 1 / prm["p"], None),
            "continuous q-gamma, V(m) = m^2 / lam_q",
        ),
        FamilyEntry(
            "q_laguerre_discrete",
            lambda p, lam, m: qbig.q_laguerre_discrete(qbig.PParams(p, lam), m),
            lambda p, lam, m, u: qbig.q_laguerre_discrete_weight(
                qbig.PParams(p, lam), m, int(round(math.log(u) / math.log(p)))
            ),
            {"p": 0.5, "lam": 1.5},
            lambda p, lam: (0.25, 2.0),
            ("q", lambda prm: 1 / prm["p"], None),
            "atoms at p^n, n in Z, V(m) = m^2 / lam_q",
        ),
        FamilyEntry(
            "wall",
            lambda q, m: qbig.wall_family(q, m),
            lambda q, m, u: qbig.wall_weight(q, m, int(round(math.log(u) / math.log(q)))),
            {"q": 0.5},
            lambda q: (0.0, 1.0),
            ("hahn", lambda p: p["q"], 1.0),
            "atoms at q^n, V(m) = m(1-m)(1-q)",
        ),
        FamilyEntry(
            "al_salam_carlitz",
            lambda p, m: qbig.al_salam_carlitz_family(p, m),
            lambda p, m, u: qbig.al_salam_carlitz_weight(p, m, int(round(-math.log(u) / math.log(p)))),
            {"p": 0.5},
            lambda p: (1.0, 1.0 + 1.0 / p),
            ("hahn", lambda prm: 1 / prm["p"], 1.0),
            "atoms at p^-n, V(m) = (1-p)(m-1)/p",
        ),
        FamilyEntry(
            "q_infinity",
            lambda lam, generator, m: qbig.q_infinity_family(_qinf_generator(lam, generator), lam, m),
            _qinf_weight,
            {"lam": 1.0, "generator": 0},
            _qinf_domain,
            None,
            "(1 + lam m u) C(du); generator 0 = two-point, 1 = semicircle",
        ),
    ]
}


# ---------------------------------------------------------- counterexamples


def _coefficient_witness(coeff: Callable[[int], float], n_max: int) -> Optional[tuple]:
    n = classical.first_negative_index(coeff, n_max)
    return None if n is None else (n, coeff(n))


def _arcsine_witness(lam: float, m: float) -> Optional[tuple]:
    for i in range(1, 201):
        u = 0.05 * i
        w = classical.arcsine_weight(lam, m, u)
        if w < 0:
            return (u, w)
    return None


COUNTEREXAMPLES: dict[str, Counterexample] = {
    c.name: c
    for c in [
        Counterexample(
            "arcsine",
            lambda lam, m: _arcsine_witness(lam, m),
            {"lam": 1.0, "m": 0.0},
            "v(m) = sqrt(1-m^2): signed kernel, witness (u, W(m, u) < 0)",
        ),
        Counterexample(
            "sqrt",
            lambda lam, n_max: _coefficient_witness(lambda n: classical.sqrt_family_phi(lam, n), int(n_max)),
            {"lam": 1.0, "n_max": 60},
            "v(m) = m sqrt(1-m): witness (n, phi_n < 0)",
        ),
        Counterexample(
            "rational_plus",
            lambda lam, n_max: _coefficient_witness(lambda n: classical.rational_phi(lam, n, "plus"), int(n_max)),
            {"lam": 1.0, "n_max": 40},
            "v(m) = m/(1+m): witness (n, phi_n < 0)",
        ),
    ]
}


COEFFICIENT_GENERATORS: dict[str, Callable[[float, int], float]] = {
    "rational-minus": lambda lam, n: classical.rational_phi(lam, n, "minus"),
    "rational-plus": lambda lam, n: classical.rational_phi(lam, n, "plus"),
    "sqrt": classical.sqrt_family_phi,
}


def get_family(name: str) -> FamilyEntry:
    try:
        return FAMILIES[name]
    except KeyError:
        raise DomainError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
