"""Exit criteria 1-10, each reduced to a (passed, detail) check.

Run under pytest (one PASS/FAIL line per criterion in the terminal summary)
or directly: ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import math
import os
import subprocess
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import mpmath as mp
import pytest

from varfam import classical, freefam, qbig, qfam, specfun
from varfam.harness.validate import GridSpec, run_suite
from varfam.measures import VarianceSpec

sys.path.insert(0, str(Path(__file__).parent))
import oracles  # noqa: E402

_SUITE = {}


def _default_report():
    if "report" not in _SUITE:
        _SUITE["report"] = run_suite(GridSpec.default())
    return _SUITE["report"]


def _rel(x, y):
    return abs(x - y) / abs(y)


# ---------------------------------------------------------------- criteria


def criterion_1():
    """Exact constant: phi_4(1) = -sqrt(e)/64 for v = m/(1+m), 1e-9 relative."""
    got = classical.rational_phi(1.0, 4, "plus")
    with mp.workdps(30):
        want = float(-mp.sqrt(mp.e) / 64)
    err = _rel(got, want)
    return err < 1e-9, f"phi_4(1) = {got:.17g}, -sqrt(e)/64 = {want:.17g}, rel err {err:.2e}"


def criterion_2():
    """phi_0 = exp(-3 lam/8) (v = m/(1-m)) and exp(lam(sqrt2-2)) (v = m sqrt(1-m)), 1e-12."""
    worst = 0.0
    for lam in (0.5, 1.0, 2.0):
        with mp.workdps(30):
            a = float(mp.exp(-3 * mp.mpf(lam) / 8))
            b = float(mp.exp(mp.mpf(lam) * (mp.sqrt(2) - 2)))
        worst = max(worst, _rel(classical.rational_phi(lam, 0), a), _rel(classical.sqrt_family_phi(lam, 0), b))
    return worst < 1e-12, f"max rel err {worst:.2e} over lam in (0.5, 1, 2)"


def criterion_3():
    """phi_n >= 0 for v = m/(1-m), n <= 40; some phi_n(1) < 0 for v = m sqrt(1-m), n <= 60."""
    neg_minus = {
        lam: classical.first_negative_index(lambda n: classical.rational_phi(lam, n), 40) for lam in (0.25, 1.0, 4.0)
    }
    n_sqrt = classical.first_negative_index(lambda n: classical.sqrt_family_phi(1.0, n), 60)
    ok = all(v is None for v in neg_minus.values()) and n_sqrt is not None
    detail = f"first negative (m/(1-m)): {neg_minus}; m sqrt(1-m): n={n_sqrt}"
    if n_sqrt is not None:
        detail += f", phi_{n_sqrt}(1) = {classical.sqrt_family_phi(1.0, n_sqrt):.6g}"
    return ok, detail


def criterion_4():
    """Every probability family reproduces (1, m, V(m)/lam) to (1e-6, 1e-6, 1e-5) on 5 means."""
    rep = _default_report()
    worst = [0.0, 0.0, 0.0]
    bad = []
    for f in rep.families:
        for p in f.points:
            if p.error is not None:
                bad.append(f"{f.family}@{p.m:.3g}: {p.error}")
                continue
            worst = [max(w, r) for w, r in zip(worst, (p.mass_residual, p.mean_residual, p.variance_residual))]
            if not (p.mass_residual < 1e-6 and p.mean_residual < 1e-6 and p.variance_residual < 1e-5):
                bad.append(f"{f.family}@{p.m:.3g}")
    n = sum(len(f.points) for f in rep.families)
    detail = f"{len(rep.families)} family grids, {n} means; worst residuals mass {worst[0]:.1e}, mean {worst[1]:.1e}, variance {worst[2]:.1e}"
    if bad:
        detail += "; failing: " + ", ".join(bad)
    return not bad and all(len(f.points) == 5 for f in rep.families), detail


def criterion_5():
    """Mean-derivative identities (ordinary, q- and Hahn) hold to 1e-10 at sampled points."""
    rep = _default_report()
    worst = {}
    for f in rep.families:
        for p in f.points:
            if p.ode_residual is not None:
                worst[f.family] = max(worst.get(f.family, 0.0), p.ode_residual)
    required = {
        "eps_gaussian", "eps_gamma", "eps_poisson", "eps_gauss_discrete", "rational",
        "q_exponential", "free", "q_laguerre", "q_laguerre_discrete", "wall", "al_salam_carlitz",
    }
    missing = required - set(worst)
    top = max(worst.values()) if worst else math.inf
    detail = f"{len(worst)} families, max scaled residual {top:.1e}"
    if missing:
        detail += f"; missing {sorted(missing)}"
    return not missing and top < 1e-10, detail


def criterion_6():
    """Free-Meixner mass lattice, G-to-V identity, exact cumulants, Jacobi moments."""
    a_grid = (-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0)
    b_grid = (-0.9, -0.5, -0.2, 0.0, 0.3, 1.0, 2.5)
    mass_err = 0.0
    atom_counts = set()
    moment_err = 0.0
    for a in a_grid:
        for b in b_grid:
            law = freefam.free_meixner(a, b)
            atom_counts.add(len(law.atoms))
            mass_err = max(mass_err, abs(law.total_mass() - 1))
            sys_ = qfam.asc_system(qfam.QExpParams(0.0, a, b), 8)
            for n in range(9):
                want = float(qfam.moments_from_jacobi(sys_, n))
                moment_err = max(moment_err, abs(law.moment(n) - want) / max(1.0, abs(want)))
    g2v = max(
        freefam.g2v_residual(VarianceSpec.quadratic(1, a, b), m)
        for a, b in ((0.3, 0.2), (0.0, 0.0), (1.0, -0.5), (-2.0, 1.0))
        for m in (-0.4, -0.1, 0.1, 0.4)
    )
    series_cases = [
        [1] + [0] * 7,
        [1, Fraction(1, 2)] + [0] * 6,
        [1, 0, 3] + [0] * 5,
        [1, Fraction(3, 10), Fraction(1, 5)] + [0] * 5,
        [1, Fraction(-2, 3), Fraction(1, 7), Fraction(5, 2), Fraction(-1, 9), 2, Fraction(1, 3), -1],
    ]
    exact = all(
        freefam.free_cumulants(VarianceSpec.from_series(c), 8).k == oracles.reversion_cumulants(c, 8) for c in series_cases
    )
    ok = mass_err < 1e-8 and g2v < 1e-10 and exact and moment_err < 1e-8 and atom_counts >= {0, 1, 2}
    detail = (
        f"49 laws (atom counts {sorted(atom_counts)}): max |mass-1| {mass_err:.1e}; g2v {g2v:.1e}; "
        f"cumulants exact to order 8: {exact}; moments n<=8 vs Jacobi {moment_err:.1e}"
    )
    return ok, detail


def criterion_7():
    """q_weight at q = 0 equals the free weight to 1e-15 relative."""
    worst = 0.0
    count = 0
    for a, b in ((0.0, 0.0), (0.3, 0.2), (-0.5, 1.0), (1.0, -0.5), (2.0, 0.0)):
        p = qfam.QExpParams(0.0, a, b)
        spec = VarianceSpec.quadratic(1, a, b)
        lo, hi = freefam.free_admissible_interval(a, b)
        slo, shi = qfam.support_interval(p)
        for i in range(1, 6):
            m = lo + (hi - lo) * i / 6
            for j in range(7):
                u = slo + (shi - slo) * j / 6
                w = freefam.free_weight(spec, m, u)
                worst = max(worst, _rel(qfam.q_weight(p, m, u), w))
                count += 1
    return worst <= 1e-15, f"{count} (a, b, m, u) points, max rel diff {worst:.1e}"


def criterion_8():
    """K_{iu}(1) < 0 for some u in (0, 10]; Fourier identity to 1e-6; q=inf non-uniqueness."""
    us = [0.05 * i for i in range(1, 201)]
    vals = [specfun.bessel_k_imag(u, 1.0) for u in us]
    kmin = min(vals)
    u_neg = next((u for u, v in zip(us, vals) if v < 0), None)
    y = 0.7
    fi = classical.fourier_identity(1.0, y)
    fi_err = abs(fi - math.exp(-math.cos(y)))
    lam = 1.0
    diffs = []
    distinct = True
    for m in (-0.5, -0.2, 0.1, 0.4):
        a = qbig.q_infinity_family(qbig.two_point_generator(lam), lam, m)
        b = qbig.q_infinity_family(qbig.semicircle_generator(lam), lam, m)
        ra = classical.moment_report(a, 1e-12)
        rb = classical.moment_report(b, 1e-12)
        target = (1 - lam * m * m) / lam
        diffs.append(max(abs(ra.variance - target), abs(rb.variance - target), abs(ra.mean - m), abs(rb.mean - m)))
        # two-point law puts mass 1/2 (1 -+ lam m / sqrt lam) on two atoms; the other has no atoms
        distinct &= len(a.measure.locations) == 2 and not hasattr(b.measure, "locations")
    ok = u_neg is not None and fi_err < 1e-6 and distinct and max(diffs) < 1e-10
    detail = (
        f"first u with K_iu(1) < 0: {u_neg} (min {kmin:.3e}); Fourier identity err {fi_err:.1e}; "
        f"two generators, same v(m) = 1 - lam m^2 to {max(diffs):.1e}, laws distinct: {distinct}"
    )
    return ok, detail


def criterion_9():
    """d^k/dx^k exp(-a(x-1)^2) at 0 = e^-a a^(k/2) H_k(sqrt a), k <= 10, 1e-8 relative."""
    worst = 0.0
    zeros = []
    for a in (0.5, 1.0, 2.0):
        for k in range(11):
            h = specfun.hermite(k)
            got = math.exp(-a) * a ** (k / 2) * float(h(math.sqrt(a)))
            want = oracles.hermite_derivative(a, k)
            scale = math.exp(-a) * a ** (k / 2) * sum(abs(float(c)) * a ** (j / 2) for j, c in enumerate(h.coefficients))
            if abs(want) < 1e-30 * scale:
                # sqrt(a) is a root of H_k: relative error is undefined, use the term scale
                zeros.append((a, k))
                err = abs(got) / scale
            else:
                err = _rel(got, want)
            worst = max(worst, err)
    return worst < 1e-8, f"33 (a, k) pairs, max rel err {worst:.1e}; exact zeros checked on term scale: {zeros}"


def criterion_10():
    """``validate`` twice on the default grid gives byte-identical JSON."""
    with tempfile.TemporaryDirectory() as tmp:
        outs = []
        for seed in ("1", "2"):
            path = os.path.join(tmp, f"run{seed}.json")
            env = dict(os.environ, PYTHONHASHSEED=seed)
            subprocess.run(
                [sys.executable, "-m", "varfam.harness.cli", "validate", "--out", path],
                env=env,
                check=True,
                capture_output=True,
                timeout=600,
            )
            outs.append(Path(path).read_bytes())
    same = outs[0] == outs[1]
    return same and len(outs[0]) > 0, f"two processes, {len(outs[0])} bytes each, identical: {same}"


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 11)}


def evaluate(n: int) -> tuple[bool, str]:
    try:
        return CRITERIA[n]()
    except Exception as exc:  # a crash is a failure, not an abort
        return False, f"{type(exc).__name__}: {exc}"


# ---------------------------------------------------------------- pytest


@pytest.mark.acceptance
@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, acceptance_log):
    ok, detail = evaluate(n)
    acceptance_log[n] = (ok, detail)
    assert ok, detail


def main() -> int:
    failed = 0
    for n in sorted(CRITERIA):
        ok, detail = evaluate(n)
        failed += not ok
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
