"""Natural exponential families with closed-form laws.

Covers the epsilon-deformed Gaussian, gamma, Poisson and lattice Gaussian
families, the Lagrange coefficient engine for discrete families, the
rational and square-root variance functions, and the signed arcsine
construction.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy import stats

from . import kernels
from . import series as ps
from .errors import DomainError, NonConvergenceError
from .harness.numerics import IntegralResult, integrate
from .measures import (
    ContinuousMeasure,
    DiscreteMeasure,
    FamilyMember,
    MomentReport,
    VarianceSpec,
    moments_of,
)
from .specfun import bessel_k, bessel_k_imag, hyp2f1_terminating, laguerre, log_bessel_ke

__all__ = [
    "eps_gaussian",
    "eps_gamma",
    "eps_poisson",
    "eps_gauss_discrete",
    "lagrange_coefficients",
    "rational_phi",
    "rational_phi_exact_sum",
    "rational_family",
    "sqrt_family_phi",
    "arcsine_weight",
    "arcsine_family",
    "fourier_identity",
    "cosine_transform_identity",
    "first_negative_index",
    "moment_report",
    "apply_operator",
]

TAIL_RTOL = 1e-12
ATOM_CAP = 10**6


def _grow_core(tail: Callable[[float], float], tol: float, start: float = 1.0) -> float:
    r = start
    for _ in range(200):
        if tail(r) <= tol:
            return r
        r *= 1.5
    raise NonConvergenceError("could not bound the density tail")


def _poly_exp_tail(u0: float, kappa: float) -> float:
    # int_{u0}^inf (1+u^2) exp(-kappa (u-u0)) du for u0 >= 0
    return (1 + u0 * u0) / kappa + 2 * u0 / kappa**2 + 2 / kappa**3


# ------------------------------------------------------------ eps-Gaussian


def _eps_gaussian_logdensity(lam: float, eps: float, m: float, u: float) -> float:
    s = math.sqrt(1 + eps * m * m)
    r = math.sqrt(1 + eps * u * u)
    e = lam / eps * ((1 + eps * u * m) / s - r)
    return math.log(lam / (math.pi * math.sqrt(eps) * r)) + e + log_bessel_ke(1.0, lam * r / eps)


def eps_gaussian(lam: float, eps: float, m: float) -> FamilyMember:
    """Member of the family with ``v(m) = (1 + eps m^2)^(3/2)``.

    The density is
    ``lam/(pi sqrt(eps) r) exp((lam/eps)((1+eps u m)/s - r)) e^{lam r/eps} K_1(lam r/eps)``
    with ``r = sqrt(1+eps u^2)``, ``s = sqrt(1+eps m^2)``.  ``metadata`` records
    the factor ``exp(lam/eps) sqrt(eps)`` relating it to the unnormalized
    closed form ``printed_density``.
    """
    if not (lam > 0 and eps > 0):
        raise DomainError("eps_gaussian needs lam > 0 and eps > 0")
    s = math.sqrt(1 + eps * m * m)
    peak = math.log(lam / (math.pi * math.sqrt(eps))) + log_bessel_ke(1.0, lam / eps)

    def density(u: float) -> float:
        return math.exp(_eps_gaussian_logdensity(lam, eps, m, u))

    def expo(u):
        return lam / eps * ((1 + eps * u * m) / s - math.sqrt(1 + eps * u * u))

    def slope(u):
        return abs(lam * (m / s - u / math.sqrt(1 + eps * u * u)))

    def tail(radius):
        hi, lo = m + radius, m - radius
        right = math.exp(peak + expo(hi)) * _poly_exp_tail(max(hi, 0.0), slope(hi))
        left = math.exp(peak + expo(lo)) * _poly_exp_tail(max(-lo, 0.0), slope(lo))
        return right + left

    def core(tol):
        r = _grow_core(tail, tol)
        return (m - r, m + r)

    def printed_density(u: float) -> float:
        return density(u) * math.exp(-lam / eps) / math.sqrt(eps)

    def weight(mm: float, u: float) -> float:
        return math.exp(_eps_gaussian_logdensity(lam, eps, mm, u))

    spec = VarianceSpec.eps_deformed(eps, 0, 1, eps, lam=lam)
    return FamilyMember(
        family="eps_gaussian",
        measure=ContinuousMeasure(density, (-math.inf, math.inf), points=(m,), core=core),
        mean=m,
        lam=lam,
        variance=s**3 / lam,
        params={"lam": lam, "eps": eps},
        spec=spec,
        metadata={
            "correction_factor": math.exp(lam / eps) * math.sqrt(eps),
            "printed_density": printed_density,
            "tail_bound": tail,
            "weight": weight,
        },
    )


# --------------------------------------------------------------- eps-gamma


def _eps_gamma_logdensity(lam: float, eps: float, m: float, u: float) -> float:
    s = math.sqrt(1 + eps * m * m)
    x = lam * math.sqrt(eps) * u
    ie = kernels.ive(lam, x)
    # leading series term once I_lam(x) underflows
    log_i = math.log(ie) + x if ie > 0 else lam * math.log(0.5 * x) - math.lgamma(lam + 1)
    return lam * math.log((1 + s) / (math.sqrt(eps) * m)) + math.log(lam / u) + log_i - lam * u * s / m


def eps_gamma(lam: float, eps: float, m: float) -> FamilyMember:
    """Member of the family with ``v(m) = m^2 sqrt(1 + eps m^2)`` on ``u > 0``.

    Density ``((1+s)/(sqrt(eps) m))^lam (lam/u) I_lam(lam sqrt(eps) u) exp(-lam u s/m)``.
    """
    if not (lam > 0 and eps > 0):
        raise DomainError("eps_gamma needs lam > 0 and eps > 0")
    if not m > 0:
        raise DomainError("eps_gamma needs m > 0")
    s = math.sqrt(1 + eps * m * m)
    logk = lam * math.log((1 + s) / (math.sqrt(eps) * m)) + math.log(lam)
    decay = lam * (s / m - math.sqrt(eps))

    def density(u: float) -> float:
        if u <= 0:
            if u < 0 or lam < 1:
                return 0.0 if u < 0 else math.inf
            if lam > 1:
                return 0.0
            return math.exp(logk) * lam * math.sqrt(eps) / 2
        return math.exp(_eps_gamma_logdensity(lam, eps, m, u))

    def tail(upper):
        # e^{-x} I_lam(x) <= 1
        return math.exp(logk - decay * upper) * (1 / (upper * decay) + upper / decay + 1 / decay**2)

    def core(tol):
        return (0.0, _grow_core(tail, tol, start=max(m, 1.0)))

    def weight(mm: float, u: float) -> float:
        return math.exp(_eps_gamma_logdensity(lam, eps, mm, u))

    return FamilyMember(
        family="eps_gamma",
        measure=ContinuousMeasure(density, (0.0, math.inf), points=(m,), core=core),
        mean=m,
        lam=lam,
        variance=m * m * s / lam,
        params={"lam": lam, "eps": eps},
        spec=VarianceSpec.eps_deformed(1, 0, 0, eps, domain=(0.0, math.inf), lam=lam),
        metadata={"weight": weight},
    )


# ------------------------------------------------------------- eps-Poisson


def _eps_poisson_parts(lam, eps, m):
    alpha = lam / math.sqrt(eps)
    s = math.sqrt(1 + eps * m * m)
    zeta = math.sqrt(eps) * m / (1 + s)
    logpref = -alpha * math.log(math.sqrt(eps) * m + s)
    return alpha, s, zeta, logpref


def eps_poisson_weight(lam: float, eps: float, m: float, n: int) -> float:
    """Mass of the atom ``n/lam`` computed from its own terminating ``2F1``."""
    alpha, _, zeta, logpref = _eps_poisson_parts(lam, eps, m)
    logpoch = math.lgamma(alpha + n) - math.lgamma(alpha) - math.lgamma(n + 1.0)
    f = hyp2f1_terminating(n, -alpha, 1.0 - alpha - n, -1.0)
    return math.exp(logpref + logpoch + n * math.log(zeta)) * f


def eps_poisson(lam: float, eps: float, m: float) -> FamilyMember:
    """Discrete member for ``v(m) = m sqrt(1 + eps m^2)``, atoms at ``n/lam``.

    Weights ``(sqrt(eps) m + s)^(-alpha) (alpha)_n/n! 2F1(-n,-alpha;1-alpha-n;-1) zeta^n``
    with ``alpha = lam/sqrt(eps)`` and ``zeta = sqrt(eps) m / (1 + s)``.
    Truncation stops when the geometric ratio bound on the remaining mass
    drops below ``1e-12`` of the accumulated mass.
    """
    if not (lam > 0 and eps > 0):
        raise DomainError("eps_poisson needs lam > 0 and eps > 0")
    if not m > 0:
        raise DomainError("eps_poisson needs m > 0")
    alpha, s, zeta, logpref = _eps_poisson_parts(lam, eps, m)
    count = 64
    while True:
        coeffs = kernels.eps_poisson_coeffs(alpha, zeta, count)
        w = coeffs * math.exp(logpref)
        last = w[-10:]
        ratios = last[1:] / np.where(last[:-1] > 0, last[:-1], 1.0)
        r = max(float(ratios.max()), zeta * max(1.0, (count + alpha) / (count + 1.0)))
        total = math.fsum(w.tolist())
        if r < 1:
            bound = float(w[-1]) * r / (1 - r)
            if bound < TAIL_RTOL * total:
                break
        if count >= ATOM_CAP:
            raise NonConvergenceError("eps_poisson tail did not converge")
        count *= 2
    loc = np.arange(count) / lam

    def weight(mm: float, u: float) -> float:
        return eps_poisson_weight(lam, eps, mm, int(round(u * lam)))

    return FamilyMember(
        family="eps_poisson",
        measure=DiscreteMeasure(loc, w, tail_bound=bound),
        mean=m,
        lam=lam,
        variance=m * s / lam,
        params={"lam": lam, "eps": eps},
        spec=VarianceSpec.eps_deformed(0, 1, 0, eps, domain=(0.0, math.inf), lam=lam),
        metadata={"weight": weight, "zeta": zeta, "alpha": alpha},
    )


# ------------------------------------------------------- eps lattice Gauss


def eps_gauss_discrete(lam: float, eps: float, m: float) -> FamilyMember:
    """Lattice member for ``v(m) = sqrt(1 + eps m^2)`` on ``(sqrt(eps)/lam) Z``.

    Site masses are computed from the compound-Poisson double sum with
    coinciding points aggregated, and independently as the tilted Bessel
    lattice ``exp(-x s) t^j I_j(x)`` with ``x = lam/eps`` and
    ``t = sqrt(eps) m + s``.  The largest per-site disagreement is kept in
    ``metadata['path_discrepancy']``.
    """
    if not (lam > 0 and eps > 0):
        raise DomainError("eps_gauss_discrete needs lam > 0 and eps > 0")
    x = lam / eps
    s = math.sqrt(1 + eps * m * m)
    t = math.sqrt(eps) * m + s
    level = x * s
    nmax = int(math.ceil(level + 12 * math.sqrt(level) + 40))
    double = kernels.lattice_double_sum(x, t, s, nmax)
    bessel = kernels.lattice_bessel(x, t, s, nmax)
    tail = float(stats.poisson.sf(nmax, level))
    sites = np.arange(-nmax, nmax + 1)
    loc = sites * math.sqrt(eps) / lam

    def weight(mm: float, u: float) -> float:
        j = int(round(u * lam / math.sqrt(eps)))
        ss = math.sqrt(1 + eps * mm * mm)
        tt = math.sqrt(eps) * mm + ss
        return math.exp(math.log(kernels.ive(float(abs(j)), x)) + x * (1 - ss) + j * math.log(tt))

    return FamilyMember(
        family="eps_gauss_discrete",
        measure=DiscreteMeasure(loc, double, tail_bound=tail),
        mean=m,
        lam=lam,
        variance=s / lam,
        params={"lam": lam, "eps": eps},
        spec=VarianceSpec.eps_deformed(0, 0, 1, eps, lam=lam),
        metadata={
            "weight": weight,
            "bessel_masses": bessel,
            "path_discrepancy": float(np.max(np.abs(double - bessel))),
        },
    )


def bessel_lattice(z: float, jmax: int | None = None) -> DiscreteMeasure:
    """Untilted lattice ``exp(-z) I_k(z)`` at the integers ``k``."""
    if jmax is None:
        jmax = int(math.ceil(z + 12 * math.sqrt(z) + 40))
    masses = np.array([kernels.ive(float(abs(k)), z) for k in range(-jmax, jmax + 1)])
    return DiscreteMeasure(np.arange(-jmax, jmax + 1, dtype=float), masses)


# ----------------------------------------------------------------- Lagrange


def lagrange_coefficients(f: Sequence, phi: Sequence, order: int) -> list:
    """Coefficients of ``f(m(xi))`` in powers of ``xi`` where ``xi = m / phi(m)``.

    ``c_0 = f(0)`` and ``c_n = (1/n!) d^{n-1}/dm^{n-1} [f'(m) phi(m)^n]`` at 0,
    read off as ``(1/n) [m^(n-1)] f'(m) phi(m)^n``.  Rational inputs give
    exact ``Fraction`` output; otherwise the work is done at 50 digits and
    returned as floats.

    Raises
    ------
    DomainError
        If ``phi(0) == 0``.
    """
    if not phi or phi[0] == 0:
        raise DomainError("phi(0) must be nonzero")
    exact = ps.is_exact(list(f)) and ps.is_exact(list(phi))
    with mpmath.workdps(ps.EXTENDED_DPS):
        fs = ps.coerce(ps.pad(list(f), order + 1))
        ph = ps.coerce(ps.pad(list(phi), order))
        if not exact:
            fs = [mpmath.mpf(c) for c in fs]
            ph = [mpmath.mpf(c) for c in ph]
        df = ps.deriv(fs)
        out = [fs[0]]
        pw = [1 + 0 * ph[0]]
        for n in range(1, order + 1):
            pw = ps.mul(pw, ph, order)
            prod = ps.mul(df, pw, n - 1)
            out.append(prod[n - 1] / n)
    if exact:
        return out
    return [float(c) for c in out]


# ----------------------------------------------------- rational variance


@lru_cache(maxsize=64)
def _hermite_products(a: Fraction, count: int, sign: int) -> tuple:
    # Q_j = a^{j/2} H_j(sqrt a); sign=-1 uses absolute Hermite coefficients
    q = [Fraction(1), 2 * a]
    for j in range(1, count):
        if sign > 0:
            q.append(2 * a * q[j] - 2 * j * a * q[j - 1])
        else:
            q.append(2 * a * q[j] + 2 * j * a * q[j - 1])
    return tuple(q)


def rational_phi_exact_sum(lam: float, n: int, sign: str = "minus") -> Fraction:
    """Exact value of the binomial-Hermite sum behind ``phi_n``.

    For ``minus``: ``sum_k C(n-1,k) n^(n-1-k) (lam/2)^((k+1)/2) H_(k+1)(sqrt(lam/2))``.
    For ``plus`` the powers of ``n`` alternate and Hermite coefficients enter
    with absolute value.  ``lam`` is taken as the exact binary rational of
    the float.
    """
    if n < 1:
        raise DomainError("the sum is defined for n >= 1")
    a = Fraction(lam) / 2
    if sign == "minus":
        q = _hermite_products(a, n + 1, 1)
        base = n
    elif sign == "plus":
        q = _hermite_products(a, n + 1, -1)
        base = -n
    else:
        raise DomainError("sign must be 'minus' or 'plus'")
    return sum(math.comb(n - 1, k) * base ** (n - 1 - k) * q[k + 1] for k in range(n))


def rational_phi(lam: float, n: int, sign: str = "minus") -> float:
    """Coefficient ``phi_n(lam)`` for ``v(m) = m/(1-m)`` (``minus``) or ``m/(1+m)`` (``plus``).

    ``minus``: ``phi_0 = exp(-3 lam/8)`` and
    ``phi_n = exp(-3 lam/8) / (2^n e^(n/2) n!) * S_n``.
    ``plus``: centered at ``m = 1/2`` with the exponent normalized to vanish
    at ``m = 1``; ``phi_0 = exp(-3 lam/2)`` and
    ``phi_n = exp(-3 lam/2) e^(n/2) / (2^n n!) * S_n``.
    ``S_n`` is :func:`rational_phi_exact_sum`, evaluated exactly.
    """
    if not lam > 0:
        raise DomainError("lam must be positive")
    if n < 0:
        raise DomainError("n must be >= 0")
    if sign not in ("minus", "plus"):
        raise DomainError("sign must be 'minus' or 'plus'")
    lead = -3 * lam / 8 if sign == "minus" else -1.5 * lam
    if n == 0:
        return math.exp(lead)
    total = rational_phi_exact_sum(lam, n, sign)
    if total == 0:
        return 0.0
    half = -0.5 * n if sign == "minus" else 0.5 * n
    with mpmath.workdps(30):
        val = mpmath.mpf(total.numerator) / total.denominator
        val *= mpmath.exp(lead + half) / (mpmath.mpf(2) ** n * mpmath.factorial(n))
        return float(val)


def rational_family(lam: float, m: float, nmax: int = 400) -> FamilyMember:
    """Discrete member for ``v(m) = m/(1-m)``, ``0 < m < 1``, atoms at ``n/lam``.

    Masses ``phi_n(lam) xi^n exp(-lam eta)`` with
    ``xi = 2 sqrt(e) m e^(-m)`` and ``eta = m - m^2/2 - 3/8``.
    """
    if not lam > 0:
        raise DomainError("lam must be positive")
    if not 0 < m < 1:
        raise DomainError("rational family needs 0 < m < 1")

    def log_xi(mm):
        return math.log(2.0) + 0.5 + math.log(mm) - mm

    def eta(mm):
        return mm - 0.5 * mm * mm - 0.375

    masses = []
    acc = 0.0
    bound = math.inf
    for n in range(nmax + 1):
        phi = rational_phi(lam, n, "minus")
        w = phi * math.exp(n * log_xi(m) - lam * eta(m)) if phi > 0 else 0.0
        masses.append(w)
        acc += w
        if n > 10 and n > 2 * lam:
            r = masses[-1] / masses[-2] if masses[-2] > 0 else 0.0
            if r < 1 and masses[-1] * r / (1 - r) < 1e-16 * acc and masses[-1] <= masses[-2]:
                bound = masses[-1] * r / (1 - r)
                break
    else:
        raise NonConvergenceError("rational family series did not converge; use a smaller m")
    masses = np.array(masses)

    def weight(mm: float, u: float) -> float:
        n = int(round(u * lam))
        return rational_phi(lam, n, "minus") * math.exp(n * log_xi(mm) - lam * eta(mm))

    return FamilyMember(
        family="rational",
        measure=DiscreteMeasure(np.arange(len(masses)) / lam, masses, tail_bound=bound),
        mean=m,
        lam=lam,
        variance=m / (lam * (1 - m)),
        params={"lam": lam},
        spec=VarianceSpec("rational_minus", (), (0.0, 1.0), lam),
        metadata={"weight": weight},
    )


# --------------------------------------------------------- sqrt variance

SQRT_C = (math.sqrt(2) - 1) ** 2


def sqrt_family_phi(lam: float, n: int) -> float:
    """``phi_n(lam)`` for ``v(m) = m sqrt(1-m)``: coefficients of
    ``exp(lam (sqrt 2 - 2) + 4 lam C xi / (1 + C xi))`` in ``xi``.

    Closed form ``exp(lam (sqrt 2 - 2)) (-C)^n L_n^(-1)(4 lam)`` with
    ``C = (sqrt 2 - 1)^2``; the Laguerre value is exact.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    base = math.exp(lam * (math.sqrt(2) - 2))
    if n == 0:
        return base
    val = laguerre(n, -1)(4 * Fraction(lam))
    if val == 0:
        return 0.0
    with mpmath.workdps(30):
        c = (mpmath.sqrt(2) - 1) ** 2
        out = mpmath.mpf(val.numerator) / val.denominator * (-c) ** n * mpmath.exp(lam * (mpmath.sqrt(2) - 2))
        return float(out)


def first_negative_index(coeff: Callable[[int], float], n_max: int) -> int | None:
    """Smallest ``n <= n_max`` with ``coeff(n) < 0``, or ``None``."""
    for n in range(n_max + 1):
        if coeff(n) < 0:
            return n
    return None


# ------------------------------------------------------------- arcsine


def arcsine_weight(lam: float, m: float, u: float) -> float:
    """Signed kernel ``(lam/pi) K_{i lam u}(lam) exp(lam sqrt(1-m^2) + lam u arcsin m)``.

    The tilt sign is the one for which the law has mean ``m``.
    """
    if not -1 < m < 1:
        raise DomainError("arcsine weight needs |m| < 1")
    return lam / math.pi * bessel_k_imag(lam * u, lam) * math.exp(lam * math.sqrt(1 - m * m) + lam * u * math.asin(m))


def _kiu_envelope(a: float, shift: float):
    # |K_{ix}(a)| <= exp(-x theta) K_0(a cos theta), any 0 <= theta < pi/2
    theta = 0.5 * (0.5 * math.pi + shift)
    return theta, bessel_k(0.0, a * math.cos(theta))


def arcsine_family(lam: float, m: float) -> FamilyMember:
    """Signed member for ``v(m) = sqrt(1 - m^2)``; flagged non-probability."""
    if not lam > 0:
        raise DomainError("lam must be positive")
    if not -1 < m < 1:
        raise DomainError("arcsine family needs |m| < 1")
    asn = abs(math.asin(m))
    theta, k0 = _kiu_envelope(lam, asn)
    kappa = lam * (theta - asn)
    amp = lam / math.pi * k0 * math.exp(lam * math.sqrt(1 - m * m))

    def tail(r):
        return 2 * amp * math.exp(-kappa * r) * _poly_exp_tail(r, kappa)

    def core(tol):
        r = _grow_core(tail, tol)
        return (-r, r)

    @lru_cache(maxsize=1 << 16)
    def density(u):
        return arcsine_weight(lam, m, u)

    return FamilyMember(
        family="arcsine",
        measure=ContinuousMeasure(density, (-math.inf, math.inf), points=(0.0,), core=core),
        mean=m,
        lam=lam,
        variance=math.sqrt(1 - m * m) / lam,
        params={"lam": lam},
        probability=False,
        spec=VarianceSpec("arcsine", (), (-1.0, 1.0), lam),
        metadata={"weight": lambda mm, u: arcsine_weight(lam, mm, u)},
    )


def fourier_identity(lam: float, y: float, tol: float = 1e-10) -> float:
    """``(1/pi) int_R K_{ix}(lam) exp(x y) dx`` for ``|y| < pi/2``; equals ``exp(-lam cos y)``."""
    if not abs(y) < 0.5 * math.pi:
        raise DomainError("needs |y| < pi/2")
    theta, k0 = _kiu_envelope(lam, abs(y))
    kappa = theta - abs(y)
    r = _grow_core(lambda x: 2 / math.pi * k0 * math.exp(-kappa * x) / kappa, 0.05 * tol)
    res = integrate(lambda x: bessel_k_imag(x, lam) * math.cosh(x * y), (0.0, r), tol)
    return 2 / math.pi * res.value


def cosine_transform_identity(a: float, y: float, tol: float = 1e-10) -> float:
    """``int_0^inf K_{ix}(a) cos(x y) dx``; equals ``(pi/2) exp(-a cosh y)``."""
    theta, k0 = _kiu_envelope(a, 0.0)
    r = _grow_core(lambda x: k0 * math.exp(-theta * x) / theta, 0.05 * tol)
    return integrate(lambda x: bessel_k_imag(x, a) * math.cos(x * y), (0.0, r), tol, limit=5000).value


# ------------------------------------------------------- moment utilities


def moment_report(member: FamilyMember, tol: float = 1e-10) -> MomentReport:
    """Mass, mean and variance of ``member.measure`` with ``tol`` attached."""
    return moments_of(member.measure, tol)


def apply_operator(member: FamilyMember, f: Callable[[float], float], tol: float = 1e-10) -> float:
    """``S(f)(m) = int f dW(m, .)``."""
    return member.measure.integrate(f, tol).value


def point_mass(a: float) -> FamilyMember:
    """Degenerate law ``delta_a`` (zero variance)."""
    return FamilyMember(
        family="point_mass",
        measure=DiscreteMeasure(np.array([a]), np.array([1.0])),
        mean=a,
        lam=1.0,
        variance=0.0,
    )
