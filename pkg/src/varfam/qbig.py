"""Families with ``q > 1`` and families built on the Hahn shifted derivative.

With ``q = 1/p``, ``0 < p < 1``:

* continuous and discrete q-Laguerre (gamma analogue) families sharing
  ``V(m) = m^2 / lam_q``;
* the ``q = inf`` construction ``(1 + lam m u) C(du)``, which shows that
  the variance function does not determine the family;
* the Wall family on ``{q^n}`` and the Al-Salam-Carlitz family on ``{p^-n}``,
  whose weights satisfy Hahn-derivative equations centred at 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import DomainError, InvariantError, NonConvergenceError, PositivityError
from .harness.numerics import hahn_derivative, q_derivative
from .measures import (
    ContinuousMeasure,
    DiscreteMeasure,
    FamilyMember,
    Measure,
    MixedMeasure,
    VarianceSpec,
    moments_of,
)

__all__ = [
    "PParams",
    "hahn_derivative",
    "q_derivative",
    "q_laguerre_continuous",
    "q_laguerre_family",
    "q_laguerre_discrete",
    "q_laguerre_discrete_weight",
    "two_point_generator",
    "semicircle_generator",
    "q_infinity_family",
    "wall_weight",
    "wall_family",
    "al_salam_carlitz_weight",
    "al_salam_carlitz_family",
]

TAIL_RTOL = 1e-16
MAX_ATOMS = 10**6


@dataclass(frozen=True)
class PParams:
    """Base ``p`` in ``(0, 1)`` (so ``q = 1/p``) and shape ``lam > 0``.

    ``lam_q = p (1 - p^lam) / (1 - p)`` is the effective scale, so that
    ``V(m) = m^2 / lam_q``; it tends to ``lam`` as ``p -> 1``.
    ``lam_q_printed`` is its reciprocal, kept for comparison.
    """

    p: float
    lam: float

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise InvariantError(f"p must lie in (0, 1), got {self.p}")
        if not self.lam > 0:
            raise InvariantError(f"lam must be positive, got {self.lam}")

    @property
    def q(self) -> float:
        return 1.0 / self.p

    @property
    def lam_q(self) -> float:
        p = self.p
        return p * -math.expm1(self.lam * math.log(p)) / (1 - p)

    @property
    def lam_q_printed(self) -> float:
        return 1.0 / self.lam_q

    @property
    def lam_1(self) -> float:
        return self.lam * (1 - self.p)

    @property
    def c_scale(self) -> float:
        """``p^-lam - 1``; the density uses ``c = c_scale / m``."""
        return math.expm1(-self.lam * math.log(self.p))

    def variance(self, m: float) -> float:
        return m * m / self.lam_q

    @property
    def spec(self) -> VarianceSpec:
        return VarianceSpec.quadratic(0, 0, 1, domain=(0.0, math.inf), lam=self.lam_q)


def _log_abs_qpoch_inf(a: float, q: float) -> tuple[float, float]:
    return kernels.log_abs_qpoch_inf(float(a), float(q))


# ---------------------------------------------------- continuous q-Laguerre


def _continuous_log_prefactor(params: PParams, m: float) -> tuple[float, float]:
    """``log|K|`` and ``sign K`` of the constant in front of ``u^(lam-1)``.

    ``K = c_scale^lam (p;p) sin(pi lam) / (pi m^lam (p^(1-lam);p))``.  For
    ``lam`` near an integer ``N >= 1`` the vanishing sine is paired with the
    vanishing factor ``1 - p^(-d)``, ``d = lam - N``.
    """
    p, lam = params.p, params.lam
    lp = math.log(p)
    logk = lam * math.log(params.c_scale) - lam * math.log(m) - math.log(math.pi)
    lpp, spp = _log_abs_qpoch_inf(p, p)
    logk += lpp
    sign = spp
    n = int(round(lam))
    d = lam - n
    if n >= 1:
        # sin(pi lam) / (1 - p^-d) -> pi / log p at d = 0
        if d == 0.0:
            ratio = math.pi / lp
        else:
            ratio = math.sin(math.pi * d) / -math.expm1(-d * lp)
        ratio *= -1.0 if n % 2 else 1.0
        rest = 0.0
        for k in range(n - 1):
            f = 1 - p ** (1 - lam + k)
            rest += math.log(abs(f))
            sign *= math.copysign(1.0, f)
        # remaining factors k >= n are all in (0, 1)
        tail_log, tail_sign = _log_abs_qpoch_inf(p ** (1 - lam + n), p)
        logk += math.log(abs(ratio)) - rest - tail_log
        sign *= math.copysign(1.0, ratio) * tail_sign
    else:
        s = math.sin(math.pi * lam)
        lq, sq = _log_abs_qpoch_inf(p ** (1 - lam), p)
        logk += math.log(abs(s)) - lq
        sign *= math.copysign(1.0, s) * sq
    return logk, sign


def q_laguerre_continuous(params: PParams, m: float, u: float) -> float:
    """Density ``w(m, u)`` of the continuous q-Laguerre family at ``u > 0``.

    ``w = K u^(lam-1) / (-u c; p)_inf`` with ``c = (p^-lam - 1)/m``.
    """
    if not m > 0:
        raise DomainError(f"m must be positive, got {m}")
    if not u > 0:
        raise DomainError(f"u must be positive, got {u}")
    logk, sign = _continuous_log_prefactor(params, m)
    c = params.c_scale / m
    lden, _ = _log_abs_qpoch_inf(-u * c, params.p)
    return sign * math.exp(logk + (params.lam - 1) * math.log(u) - lden)


def _continuous_core(params: PParams, m: float) -> Callable[[float], tuple]:
    p, lam = params.p, params.lam
    logk, _ = _continuous_log_prefactor(params, m)
    c = params.c_scale / m
    lc, lp = math.log(c), math.log(p)

    def lower(eps):
        # (-uc;p) >= 1
        return math.exp(logk) * (eps**lam / lam + eps ** (lam + 2) / (lam + 2))

    def upper(big):
        # (-uc;p) >= prod_{k<K} u c p^k
        lu = math.log(big)
        best = math.inf
        for kk in range(int(math.ceil(lam + 2)) + 1, int(lam) + 80):
            expo = lam + 2 - kk
            lb = logk + math.log(2.0 / (kk - lam - 2)) + expo * lu - kk * lc - lp * kk * (kk - 1) / 2
            best = min(best, lb)
        return math.exp(best)

    def core(tol: float) -> tuple:
        eps = min(1.0, m)
        while lower(eps) > 0.5 * tol:
            eps *= 0.5
        big = max(1.0, 2 * m)
        while upper(big) > 0.5 * tol:
            big *= 2.0
            if big > 1e300:
                raise NonConvergenceError("q-Laguerre upper tail bound did not converge")
        return eps, big

    return core


def q_laguerre_family(params: PParams, m: float) -> FamilyMember:
    """Continuous q-Laguerre member with mean ``m`` and variance ``m^2/lam_q``."""
    if not m > 0:
        raise DomainError(f"m must be positive, got {m}")
    measure = ContinuousMeasure(
        lambda u: q_laguerre_continuous(params, m, u),
        (0.0, math.inf),
        core=_continuous_core(params, m),
        log_variable=True,
    )
    return FamilyMember(
        family="q_laguerre",
        measure=measure,
        mean=m,
        lam=params.lam_q,
        variance=params.variance(m),
        params={"p": params.p, "lam": params.lam},
        spec=params.spec,
        metadata={"weight": lambda mm, u: q_laguerre_continuous(params, mm, u), "q": params.q},
    )


# ------------------------------------------------------ discrete q-Laguerre


def _discrete_log_constant(params: PParams, m: float) -> float:
    """Log of ``(p^lam;p)/(p;p) (-c, -p/c; p) / (-c p^lam, -p^(1-lam)/c; p)``."""
    p, lam = params.p, params.lam
    c = params.c_scale / m
    s = 0.0
    for a, sgn in ((p**lam, 1), (p, -1), (-c, 1), (-p / c, 1), (-c * p**lam, -1), (-(p ** (1 - lam)) / c, -1)):
        s += sgn * _log_abs_qpoch_inf(a, p)[0]
    return s


def q_laguerre_discrete_weight(params: PParams, m: float, n: int) -> float:
    """Mass of the discrete q-Laguerre member at ``u = p^n``."""
    if not m > 0:
        raise DomainError(f"m must be positive, got {m}")
    p, lam = params.p, params.lam
    c = params.c_scale / m
    u = p**n
    lden, _ = _log_abs_qpoch_inf(-c * u, p)
    return math.exp(_discrete_log_constant(params, m) + lam * n * math.log(p) - lden)


def q_laguerre_discrete(params: PParams, m: float) -> FamilyMember:
    """Discrete q-Laguerre member on ``{p^n : n in Z}``.

    Starting at the mode ``n0 ~ log m / log p`` the masses are extended in
    both directions through their ratios, ``p^lam (1 + c p^n)`` upwards in
    ``n`` and ``p^-lam / (1 + c p^(n-1))`` downwards.  Each side stops once
    a geometric bound on its remaining ``(1 + u^2)``-weighted mass is below
    ``1e-16`` of the accumulated mass.

    Raises
    ------
    NonConvergenceError
        If either side needs more than ``10**6`` atoms.
    """
    if not m > 0:
        raise DomainError(f"m must be positive, got {m}")
    p, lam = params.p, params.lam
    c = params.c_scale / m
    lp = math.log(p)
    n0 = int(round(math.log(m) / lp))
    w0 = q_laguerre_discrete_weight(params, m, n0)
    logw = {n0: math.log(w0)}
    tails = []
    for step in (1, -1):
        n, lw, acc = n0, logw[n0], w0
        while True:
            # R bounds every later (1 + u^2)-weighted mass ratio on this side
            if step == 1:
                ratio = p**lam * (1 + c * p**n)
                rb = ratio
            else:
                ratio = p ** (-lam) / (1 + c * p ** (n - 1))
                rb = ratio / (p * p)
            if rb < 1:
                u = p**n
                bound = math.exp(lw) * (1 + u * u) * rb / (1 - rb)
                if bound < TAIL_RTOL * acc:
                    tails.append(bound)
                    break
            n += step
            lw += math.log(ratio)
            logw[n] = lw
            acc += math.exp(lw)
            if abs(n - n0) > MAX_ATOMS:
                raise NonConvergenceError("discrete q-Laguerre tail did not converge")
    ns = sorted(logw)
    loc = np.array([p**n for n in ns])
    mass = np.array([math.exp(logw[n]) for n in ns])

    def weight(mm: float, u: float) -> float:
        return q_laguerre_discrete_weight(params, mm, int(round(math.log(u) / lp)))

    return FamilyMember(
        family="q_laguerre_discrete",
        measure=DiscreteMeasure(loc, mass, tail_bound=sum(tails)),
        mean=m,
        lam=params.lam_q,
        variance=params.variance(m),
        params={"p": p, "lam": lam},
        spec=params.spec,
        metadata={"weight": weight, "q": params.q},
    )


# ---------------------------------------------------------------- q = inf


def two_point_generator(lam: float) -> DiscreteMeasure:
    """Symmetric atoms at ``+-1/sqrt(lam)``: mean 0, variance ``1/lam``."""
    if not lam > 0:
        raise DomainError("lam must be positive")
    r = 1 / math.sqrt(lam)
    return DiscreteMeasure(np.array([-r, r]), np.array([0.5, 0.5]))


def semicircle_generator(lam: float) -> ContinuousMeasure:
    """Semicircle of radius ``2/sqrt(lam)``: mean 0, variance ``1/lam``."""
    if not lam > 0:
        raise DomainError("lam must be positive")
    radius = 2 / math.sqrt(lam)
    c = 2 / (math.pi * radius * radius)

    def density(u):
        return c * math.sqrt(max(radius * radius - u * u, 0.0))

    return ContinuousMeasure(density, (-radius, radius), smooth=lambda u: c, alg=(0.5, 0.5))


def _support_extremes(measure: Measure) -> list[float]:
    if isinstance(measure, DiscreteMeasure):
        return measure.locations.tolist()
    if isinstance(measure, ContinuousMeasure):
        return list(measure.support)
    return _support_extremes(measure.continuous) + _support_extremes(measure.discrete)


def _tilted(measure: Measure, factor: Callable[[float], float]) -> Measure:
    if isinstance(measure, DiscreteMeasure):
        mass = measure.masses * np.array([factor(u) for u in measure.locations.tolist()])
        return DiscreteMeasure(measure.locations, mass, measure.tail_bound, measure.approximate)
    if isinstance(measure, ContinuousMeasure):
        smooth = None if measure.smooth is None else (lambda u: measure.smooth(u) * factor(u))
        return ContinuousMeasure(
            lambda u: measure.density(u) * factor(u),
            measure.support,
            measure.points,
            measure.core,
            smooth,
            measure.alg,
            measure.log_variable,
        )
    return MixedMeasure(_tilted(measure.continuous, factor), _tilted(measure.discrete, factor))


def q_infinity_family(generator: Measure, lam: float, m: float, tol: float = 1e-12) -> FamilyMember:
    """Member ``(1 + lam m u) C(du)`` for a generator ``C`` with mean 0 and variance ``1/lam``.

    Its variance is ``v(m)/lam`` with ``v(m) = 1 + lam^2 T3 m - lam m^2`` and
    ``T3`` the third moment of ``C``.

    Raises
    ------
    InvariantError
        If ``C`` does not have mass 1, mean 0 and variance ``1/lam``.
    PositivityError
        If ``1 + lam m u < 0`` somewhere on the support of ``C``.
    """
    if not lam > 0:
        raise DomainError("lam must be positive")
    rep = moments_of(generator, tol)
    if abs(rep.mass - 1) > 1e-9 or abs(rep.mean) > 1e-9 or abs(rep.variance - 1 / lam) > 1e-9:
        raise InvariantError(
            f"generator must have mass 1, mean 0, variance 1/lam; got {rep.as_tuple()}"
        )
    for u in _support_extremes(generator):
        if 1 + lam * m * u < 0:
            raise PositivityError(f"1 + lam m u < 0 at u={u} for m={m}", witness=u)
    t3 = generator.integrate(lambda u: u**3, tol).value
    ext = _support_extremes(generator)
    lo = -1 / (lam * max(ext)) if max(ext) > 0 else -math.inf
    hi = 1 / (lam * -min(ext)) if min(ext) < 0 else math.inf
    spec = VarianceSpec.quadratic(1, lam * lam * t3, -lam, domain=(lo, hi), lam=lam)
    v = 1 + lam * lam * t3 * m - lam * m * m
    return FamilyMember(
        family="q_infinity",
        measure=_tilted(generator, lambda u: 1 + lam * m * u),
        mean=m,
        lam=lam,
        variance=v / lam,
        params={"lam": lam, "t3": t3},
        spec=spec,
        metadata={"t3": t3},
    )


# ------------------------------------------------------------------- Wall


def wall_weight(q: float, m: float, n: int) -> float:
    """``w(m, q^n) = a^n (a q; q)_inf`` with ``a = (1 - m)/q``."""
    a = (1 - m) / q
    return a**n * kernels.qpoch(a * q, q, -1)


def wall_family(q: float, m: float) -> FamilyMember:
    """Wall family on ``{q^n : n >= 0}`` with ``V(m) = m (1 - m)(1 - q)``.

    Masses ``(1-m)^n (1-m; q)_inf / (q; q)_n``.  The ratio of consecutive
    masses, ``(1-m)/(1-q^(n+1))``, decreases, giving a geometric tail bound.
    """
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    if not 0 < m < 1:
        raise DomainError(f"m must lie in (0, 1), got {m}")
    base = kernels.qpoch(1 - m, q, -1)
    masses = [base]
    acc = base
    n = 0
    while True:
        r = (1 - m) / (1 - q ** (n + 1))
        masses.append(masses[-1] * r)
        n += 1
        acc += masses[-1]
        rn = (1 - m) / (1 - q ** (n + 1))
        if rn < 1:
            bound = 2 * masses[-1] * rn / (1 - rn)
            if bound < TAIL_RTOL * acc:
                break
        if n > MAX_ATOMS:
            raise NonConvergenceError("Wall family tail did not converge")
    loc = np.array([q**k for k in range(len(masses))])

    def weight(mm: float, u: float) -> float:
        return wall_weight(q, mm, int(round(math.log(u) / math.log(q))))

    c = 1 - q
    return FamilyMember(
        family="wall",
        measure=DiscreteMeasure(loc, np.array(masses), tail_bound=bound),
        mean=m,
        lam=1.0,
        variance=m * (1 - m) * c,
        params={"q": q},
        spec=VarianceSpec.quadratic(0, c, -c, domain=(0.0, 1.0)),
        metadata={"weight": weight, "q": q, "theta": 1.0},
    )


# -------------------------------------------------------- Al-Salam-Carlitz


def al_salam_carlitz_weight(p: float, m: float, k: int) -> float:
    """``w(m, p^-k) = a^k (a p^(k+1); p)_inf`` with ``a = m - 1``."""
    a = m - 1
    return a**k * kernels.qpoch(a * p ** (k + 1), p, -1)


def al_salam_carlitz_family(p: float, m: float) -> FamilyMember:
    """Family on ``{p^-k : k >= 0}`` with ``V(m) = (1 - p)(m - 1)/p``.

    Masses ``a^k p^(k^2) / (p; p)_k (a p^(k+1); p)_inf`` with ``a = m - 1``.
    For ``m > 1 + 1/p`` the factor ``1 - a p`` is negative and the member is
    a signed measure; it is returned with ``probability=False`` and the
    negative atom in ``metadata['witness']``.
    """
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if not m > 1:
        raise DomainError(f"m must exceed 1, got {m}")
    a = m - 1
    masses, locs = [], []
    k = 0
    acc = 0.0
    log_pp = 0.0  # log (p;p)_k
    while True:
        w = al_salam_carlitz_weight(p, m, k)
        mass = w * math.exp(k * k * math.log(p) - log_pp)
        u = p ** (-k)
        masses.append(mass)
        locs.append(u)
        acc += abs(mass)
        # |mass_{k+1} (1+u_{k+1}^2)| / |mass_k (1+u_k^2)| <= r_k, decreasing in k
        r = abs(a) * p ** (2 * k - 1) / ((1 - p ** (k + 1)) * max(1 - abs(a) * p ** (k + 1), 1e-300))
        if abs(a) * p ** (k + 1) < 0.5 and r < 0.5:
            bound = abs(mass) * (1 + u * u) * r / (1 - r)
            if bound < TAIL_RTOL * acc:
                break
        log_pp += math.log1p(-(p ** (k + 1)))
        k += 1
        if k > MAX_ATOMS:
            raise NonConvergenceError("Al-Salam-Carlitz tail did not converge")
    masses_arr = np.array(masses)
    neg = [(u, w) for u, w in zip(locs, masses) if w < 0]
    metadata = {"weight": lambda mm, u: al_salam_carlitz_weight(p, mm, int(round(-math.log(u) / math.log(p)))),
                "q": 1 / p, "theta": 1.0}
    if neg:
        metadata["witness"] = neg[0]
    c = (1 - p) / p
    return FamilyMember(
        family="al_salam_carlitz",
        measure=DiscreteMeasure(np.array(locs), masses_arr, tail_bound=bound),
        mean=m,
        lam=1.0,
        variance=c * (m - 1),
        params={"p": p},
        probability=not neg,
        spec=VarianceSpec.quadratic(-c, c, 0, domain=(1.0, math.inf)),
        metadata=metadata,
    )
