"""Compiled numerical kernels.

Every function here is a plain scalar/array routine decorated with
:func:`varfam._accel.njit`.  They take only floats, ints and float arrays so
that the pure-Python fallback behaves identically.
"""
from __future__ import annotations

import math

import numpy as np

from ._accel import njit

# Gauss-Legendre rule on [-1, 1] shared by the composite integrators.
GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(20)

_INF_CAP = 100000


@njit
def qpoch(a, q, n):
    """Finite (``n >= 0``) or infinite (``n < 0``) q-Pochhammer product."""
    r = 1.0
    t = a
    if n >= 0:
        for _ in range(n):
            r *= 1.0 - t
            t *= q
        return r
    for _ in range(_INF_CAP):
        if abs(t) < 1e-16:
            break
        r *= 1.0 - t
        t *= q
    return r


@njit
def log_abs_qpoch_inf(a, q):
    """``log|(a; q)_inf|`` and the sign of the product."""
    s = 0.0
    sign = 1.0
    t = a
    for _ in range(_INF_CAP):
        if abs(t) < 1e-16:
            break
        f = 1.0 - t
        if f < 0.0:
            sign = -sign
        elif f == 0.0:
            return -np.inf, 0.0
        s += math.log(abs(f))
        t *= q
    return s, sign


@njit
def ive_series(nu, x):
    """``exp(-x) I_nu(x)`` for ``nu >= 0`` from the power series.

    The sum is taken outward from its largest term so that no partial sum
    overflows or underflows.
    """
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    h = 0.5 * x
    h2 = h * h
    kstar = 0.5 * (-nu + math.sqrt(nu * nu + x * x))
    k0 = int(kstar)
    logt0 = (2.0 * k0 + nu) * math.log(h) - math.lgamma(k0 + 1.0) - math.lgamma(k0 + nu + 1.0) - x
    s = 1.0
    t = 1.0
    k = k0
    while True:
        t *= h2 / ((k + 1.0) * (k + 1.0 + nu))
        k += 1
        s += t
        if t < 1e-17 * s:
            break
    t = 1.0
    k = k0
    while k > 0:
        t *= k * (k + nu) / h2
        k -= 1
        s += t
        if t < 1e-17 * s:
            break
    return math.exp(logt0 + math.log(s))


@njit
def ive_asymptotic(nu, x):
    """``exp(-x) I_nu(x)`` from the large-argument expansion."""
    mu = 4.0 * nu * nu
    term = 1.0
    s = 1.0
    prev = 1.0
    for k in range(1, 200):
        term *= -(mu - (2.0 * k - 1.0) ** 2) / (8.0 * k * x)
        a = abs(term)
        if a > prev:
            break
        s += term
        if a < 1e-17 * abs(s):
            break
        prev = a
    return s / math.sqrt(2.0 * math.pi * x)


@njit
def ive(nu, x):
    """``exp(-x) I_nu(x)`` for ``nu >= 0``, ``x >= 0``."""
    if x > 50.0 and x > nu * nu:
        return ive_asymptotic(nu, x)
    return ive_series(nu, x)


@njit
def _gl_panels(lo, hi, panels, nodes, weights, kind, p1, p2, p3):
    # Composite Gauss-Legendre for the fixed integrands below.
    width = (hi - lo) / panels
    half = 0.5 * width
    total = 0.0
    for j in range(panels):
        mid = lo + (j + 0.5) * width
        acc = 0.0
        for i in range(nodes.shape[0]):
            t = mid + half * nodes[i]
            if kind == 0:
                # p1 = x, p2 = nu, p3 = g* ; log integrand of e^x K_nu(x)
                g = -p1 * (math.cosh(t) - 1.0) + p2 * t + math.log1p(math.exp(-2.0 * p2 * t)) - math.log(2.0)
                acc += weights[i] * math.exp(g - p3)
            else:
                # p1 = a cos(theta), p2 = u, p3 = a sin(theta)
                acc += weights[i] * math.exp(-p1 * (math.cosh(t) - 1.0)) * math.cos(p2 * t - p3 * math.sinh(t))
        total += acc * half
    return total


@njit
def log_kve(nu, x, nodes, weights):
    """``log(exp(x) K_nu(x))`` from the cosh integral representation."""
    nu = abs(nu)
    if nu == 0.0:
        tstar = 0.0
    else:
        tstar = math.asinh(nu / x)

    def g(t):
        return -x * (math.cosh(t) - 1.0) + nu * t + math.log1p(math.exp(-2.0 * nu * t)) - math.log(2.0)

    gstar = g(tstar)
    d = 1.0
    while g(tstar + d) - gstar > -45.0:
        d *= 2.0
    hi = tstar + d
    panels = 8
    prev = _gl_panels(0.0, hi, panels, nodes, weights, 0, x, nu, gstar)
    while panels < 4096:
        panels *= 2
        cur = _gl_panels(0.0, hi, panels, nodes, weights, 0, x, nu, gstar)
        if abs(cur - prev) <= 1e-15 * abs(cur):
            prev = cur
            break
        prev = cur
    return gstar + math.log(prev)


@njit
def bessel_k_imag_kernel(u, a, nodes, weights):
    """``K_{iu}(a)`` on a contour shifted by ``theta`` into the upper half plane."""
    u = abs(u)
    if u > 6.0 / math.pi:
        theta = 0.5 * math.pi - 3.0 / u
    else:
        theta = 0.0
    c = a * math.cos(theta)
    sn = a * math.sin(theta)
    hi = math.acosh(1.0 + 40.0 / c)
    panels = 16
    prev = _gl_panels(0.0, hi, panels, nodes, weights, 1, c, u, sn)
    while panels < 16384:
        panels *= 2
        cur = _gl_panels(0.0, hi, panels, nodes, weights, 1, c, u, sn)
        if abs(cur - prev) <= 1e-14 * max(abs(cur), 1e-3):
            prev = cur
            break
        prev = cur
    return math.exp(-c - u * theta) * prev


@njit
def asc_weight(q, a, b, m, u):
    """Truncated infinite product of the q-family weight; returns (value, ok)."""
    r = 1.0
    ca = a
    cd = a - (1.0 - q) * u
    cb = b + 1.0 - q
    mk = m
    for _ in range(_INF_CAP):
        num = 1.0 + a * mk + b * mk * mk
        # = 1 + cd mk + cb mk^2, grouped so that q = 0 is the free weight verbatim
        den = num + (1.0 - q) * mk * (mk - u)
        if den <= 0.0:
            return np.nan, False
        r *= num / den
        if abs(mk) * (abs(ca) + abs(cd)) + mk * mk * (abs(b) + abs(cb)) < 1e-17:
            break
        mk *= q
        if mk == 0.0:
            break
    return r, True


@njit
def hyp2f1_term_sum(n, b, c, z):
    """Terminating sum of ``2F1(-n, b; c; z)``; caller guarantees no pole."""
    t = 1.0
    s = 1.0
    for k in range(n):
        t *= (-n + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        s += t
    return s


@njit
def eps_poisson_coeffs(alpha, zeta, count):
    """Coefficients of ``zeta**n`` in ``((1+zeta)/(1-zeta))**alpha`` times ``zeta**n``.

    Each coefficient is ``(alpha)_n / n! * 2F1(-n, -alpha; 1-alpha-n; -1)``.
    """
    out = np.empty(count)
    poch = 1.0
    lz = math.log(zeta) if zeta > 0.0 else -np.inf
    for n in range(count):
        f = hyp2f1_term_sum(n, -alpha, 1.0 - alpha - n, -1.0)
        if n == 0:
            out[n] = f
        else:
            out[n] = poch * f * math.exp(n * lz)
        poch *= (alpha + n) / (n + 1.0)
    return out


@njit
def lattice_double_sum(x, t, s, nmax):
    """Site masses of the tilted Bessel lattice by the compound-Poisson double sum.

    Returns an array of length ``2*nmax+1`` indexed by site ``j + nmax``.
    The mass at site ``j`` is ``exp(-x s) sum_n (x/2)^n/n! C(n,k) t^(2k-n)``
    with ``j = 2k - n``.
    """
    out = np.zeros(2 * nmax + 1)
    lh = math.log(0.5 * x)
    lt = math.log(t)
    base = -x * s
    for n in range(nmax + 1):
        ln = n * lh - math.lgamma(n + 1.0) + base
        for k in range(n + 1):
            j = 2 * k - n
            lc = math.lgamma(n + 1.0) - math.lgamma(k + 1.0) - math.lgamma(n - k + 1.0)
            out[j + nmax] += math.exp(ln + lc + j * lt)
    return out


@njit
def lattice_bessel(x, t, s, jmax):
    """Site masses ``exp(-x s) t^j I_j(x)`` for ``|j| <= jmax``."""
    out = np.zeros(2 * jmax + 1)
    lt = math.log(t)
    for j in range(-jmax, jmax + 1):
        v = ive(float(abs(j)), x)
        if v > 0.0:
            out[j + jmax] = math.exp(math.log(v) + x * (1.0 - s) + j * lt)
    return out
