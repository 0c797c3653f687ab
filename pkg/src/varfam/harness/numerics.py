"""Quadrature, series summation and numerical differentiation.

These are the only places where integrals and sums of measures are formed;
every family constructor and validator goes through them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate as _sint

from ..errors import DomainError, NonConvergenceError

__all__ = ["IntegralResult", "integrate", "sum_series", "derivative", "q_derivative", "hahn_derivative"]


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error: float


def integrate(
    density: Callable[[float], float],
    support: tuple[float, float],
    tol: float = 1e-10,
    *,
    points: Sequence[float] = (),
    tail: float = 0.0,
    alg: tuple[float, float] | None = None,
    limit: int = 2000,
) -> IntegralResult:
    """Adaptive Gauss-Kronrod integral of ``density`` over ``support``.

    Parameters
    ----------
    density
        Integrand.  When ``alg`` is given it is the smooth factor and the
        integral is of ``density(u) (u-lo)**alg[0] (hi-u)**alg[1]``.
    support
        Integration interval, endpoints may be infinite.
    tol
        Absolute error target.  The returned error includes ``tail``.
    points
        Interior break points handed to the bisection.
    tail
        Already certified bound on the mass outside ``support``.

    Raises
    ------
    NonConvergenceError
        If the estimated error exceeds ``tol``.
    """
    lo, hi = float(support[0]), float(support[1])
    if not hi > lo:
        return IntegralResult(0.0, tail)
    if tail > tol:
        raise NonConvergenceError(f"tail bound {tail:.3g} already exceeds tolerance {tol:.3g}")
    budget = max(tol - tail, 0.25 * tol)
    kw = dict(epsabs=0.1 * budget, epsrel=1e-13, limit=limit, full_output=1)
    if alg is not None:
        res = _sint.quad(density, lo, hi, weight="alg", wvar=alg, **kw)
    else:
        pts = [p for p in points if lo < p < hi]
        if pts and math.isfinite(lo) and math.isfinite(hi):
            res = _sint.quad(density, lo, hi, points=sorted(set(pts)), **kw)
        else:
            res = _sint.quad(density, lo, hi, **kw)
    value, err = float(res[0]), float(res[1])
    if not math.isfinite(value) or err > budget:
        raise NonConvergenceError(f"quadrature error {err:.3g} above tolerance {budget:.3g}")
    return IntegralResult(value, err + tail)


def sum_series(
    atoms: Iterable[tuple[float, float]] | tuple[np.ndarray, np.ndarray],
    tol: float = 1e-10,
    tail_bound: float = 0.0,
) -> tuple[float, float, float]:
    """Mass, mean and central second moment of a truncated atom list.

    ``atoms`` is an iterable of ``(location, mass)`` pairs or a pair of arrays.
    Sums use :func:`math.fsum` so the result does not depend on ordering.

    Raises
    ------
    NonConvergenceError
        If ``tail_bound`` exceeds ``tol``.
    """
    if tail_bound > tol:
        raise NonConvergenceError(f"tail bound {tail_bound:.3g} exceeds tolerance {tol:.3g}")
    if isinstance(atoms, tuple) and len(atoms) == 2 and isinstance(atoms[0], np.ndarray):
        loc, mass = np.asarray(atoms[0], float), np.asarray(atoms[1], float)
    else:
        pairs = list(atoms)
        loc = np.array([p[0] for p in pairs], float)
        mass = np.array([p[1] for p in pairs], float)
    m0 = math.fsum(mass)
    m1 = math.fsum(mass * loc)
    mean = m1
    m2 = math.fsum(mass * (loc - mean) ** 2)
    return m0, mean, m2


def derivative(f: Callable[[float], float], x: float, h: float = 1e-2, order: int = 1) -> float:
    """Ridders' extrapolated central difference (first or second derivative)."""
    ntab = 10
    con, con2 = 1.4, 1.96
    a = [[0.0] * ntab for _ in range(ntab)]

    def diff(step):
        if order == 1:
            return (f(x + step) - f(x - step)) / (2 * step)
        return (f(x + step) - 2 * f(x) + f(x - step)) / (step * step)

    hh = h
    a[0][0] = diff(hh)
    best, err = a[0][0], math.inf
    for i in range(1, ntab):
        hh /= con
        a[0][i] = diff(hh)
        fac = con2
        for j in range(1, i + 1):
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1)
            fac *= con2
            e = max(abs(a[j][i] - a[j - 1][i]), abs(a[j][i] - a[j - 1][i - 1]))
            if e <= err:
                err, best = e, a[j][i]
        if abs(a[i][i] - a[i - 1][i - 1]) >= 2 * err:
            break
    return best


def q_derivative(f: Callable[[float], float], q: float, x: float) -> float:
    """``(f(x) - f(qx)) / (x - qx)``."""
    if x == 0:
        raise DomainError("q-derivative is undefined at x = 0")
    return (f(x) - f(q * x)) / (x - q * x)


def hahn_derivative(f: Callable[[float], float], q: float, theta: float, x: float) -> float:
    """``(f(x) - f(qx + (1-q) theta)) / ((1-q)(x - theta))``."""
    if x == theta:
        raise DomainError("Hahn derivative is undefined at x = theta")
    if q == 1:
        raise DomainError("Hahn derivative needs q != 1")
    return (f(x) - f(q * x + (1 - q) * theta)) / ((1 - q) * (x - theta))


def largest_valid_interval(
    ok: Callable[[float], bool],
    scale: float = 1.0,
    cap: float = 1e6,
    grid: int = 400,
    bisections: int = 60,
) -> tuple[float, float]:
    """Largest interval around 0 on which ``ok`` holds.

    Each side is scanned on a geometric grid starting at ``scale * 1e-6``;
    the first failing point is refined against the last passing point by
    bisection.  A side that never fails up to ``cap`` is reported as
    infinite.
    """
    ends = []
    for sgn in (-1.0, 1.0):
        good = 0.0
        bad = None
        x = scale * 1e-6
        ratio = (cap / x) ** (1.0 / grid)
        for _ in range(grid):
            if ok(sgn * x):
                good = x
                x *= ratio
            else:
                bad = x
                break
        if bad is None:
            ends.append(math.inf)
            continue
        for _ in range(bisections):
            mid = 0.5 * (good + bad)
            if ok(sgn * mid):
                good = mid
            else:
                bad = mid
        ends.append(good)
    return (-ends[0], ends[1])
