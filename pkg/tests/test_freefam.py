import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varfam import classical, freefam, qfam
from varfam.errors import DomainError, InsufficientOrderError
from varfam.harness.numerics import integrate
from varfam.measures import VarianceSpec

import oracles

A_GRID = (-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0)
B_GRID = (-0.9, -0.5, -0.2, 0.0, 0.3, 1.0, 2.5)


def test_semicircle_law():
    law = freefam.free_meixner(0.0, 0.0)
    assert law.atoms == ()
    assert law.ac_support == (-2.0, 2.0)
    for u in (-1.5, 0.0, 0.7):
        assert law.density(u) == pytest.approx(math.sqrt(4 - u * u) / (2 * math.pi), rel=1e-15)


def test_single_atom_case():
    law = freefam.free_meixner(2.0, 0.0)
    assert len(law.atoms) == 1
    u, p = law.atoms[0]
    assert u == pytest.approx(-0.5, rel=1e-15)
    assert p == pytest.approx(0.75, rel=1e-15)
    assert law.total_mass() == pytest.approx(1.0, abs=1e-10)


def test_no_atom_case():
    law = freefam.free_meixner(1.0, 1.0)
    assert law.atoms == ()
    assert law.ac_mass() == pytest.approx(1.0, abs=1e-8)


def test_free_meixner_domain():
    with pytest.raises(DomainError):
        freefam.free_meixner(0.0, -1.0)


@pytest.mark.parametrize("a", A_GRID)
@pytest.mark.parametrize("b", B_GRID)
def test_total_mass_lattice(a, b):
    assert freefam.free_meixner(a, b).total_mass() == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("a,b", [(0.3, 0.2), (2.0, 0.0), (-1.0, -0.5), (3.0, 1.0), (1.0, 0.25)])
def test_moments_match_jacobi(a, b):
    law = freefam.free_meixner(a, b)
    sys = qfam.asc_system(qfam.QExpParams(0.0, a, b), 8)
    for n in range(9):
        assert law.moment(n) == pytest.approx(float(qfam.moments_from_jacobi(sys, n)), rel=1e-8, abs=1e-8)


def test_cauchy_transform_examples():
    assert freefam.cauchy_transform(0.0, 0.0, 2.5) == pytest.approx(0.5, rel=1e-15)
    assert abs(freefam.cauchy_transform(0.0, 0.0, 1e3) * 1e3 - 1) < 2e-3
    a, b, z = 0.5, 0.3, 4.0
    law = freefam.free_meixner(a, b)
    lo, hi = law.ac_support
    direct = integrate(lambda u: law.density(u) / (z - u), (lo, hi), 1e-12).value
    direct += sum(p / (z - u) for u, p in law.atoms)
    assert freefam.cauchy_transform(a, b, z) == pytest.approx(direct, abs=1e-8)


def test_cauchy_transform_rejects_support():
    with pytest.raises(DomainError):
        freefam.cauchy_transform(0.0, 0.0, 1.0)


def test_g2v_residual():
    assert freefam.g2v_residual(VarianceSpec.quadratic(1, 0, 0), 0.5) == pytest.approx(0.0, abs=1e-16)
    spec = VarianceSpec.quadratic(1, 0.3, 0.2)
    for m in (-0.4, -0.1, 0.1, 0.4):
        assert freefam.g2v_residual(spec, m) < 1e-10
    with pytest.raises(DomainError):
        freefam.g2v_residual(spec, 0.0)


def test_free_weight_examples():
    spec = VarianceSpec.quadratic(1, 0.3, 0.2)
    assert freefam.free_weight(spec, 0.0, 1.3) == 1.0
    assert freefam.free_weight(spec, 0.2, 0.2) == 1.0
    member = freefam.free_family(0.3, 0.2, 0.2)
    assert member.measure.integrate(None, 1e-12).value == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("a,b", [(0.3, 0.2), (2.0, 0.0), (-1.0, -0.5)])
def test_free_family_moments(a, b):
    lo, hi = freefam.free_admissible_interval(a, b)
    for m in (0.6 * lo, 0.6 * hi):
        rep = classical.moment_report(freefam.free_family(a, b, m), 1e-11)
        assert rep.mass == pytest.approx(1.0, abs=1e-9)
        assert rep.mean == pytest.approx(m, abs=1e-9)
        assert rep.variance == pytest.approx(1 + a * m + b * m * m, abs=1e-9)


def test_free_family_rejects_outside():
    with pytest.raises(DomainError):
        freefam.free_family(0.3, 0.2, 5.0)


def test_cumulants_trivial_cases():
    k = freefam.free_cumulants(VarianceSpec.from_series([1, 0, 0, 0, 0, 0, 0]), 8)
    assert k.as_list() == [0, 1, 0, 0, 0, 0, 0, 0]


def test_cumulants_linear_variance():
    a = Fraction(1, 3)
    k = freefam.free_cumulants(VarianceSpec.from_series([1, a] + [0] * 6), 8)
    for n in range(1, 8):
        assert k[n + 1] == a ** (n - 1)


def test_cumulants_quadratic_variance():
    b = Fraction(2, 5)
    k = freefam.free_cumulants(VarianceSpec.quadratic(1, 0, b), 8)
    assert (k[2], k[3], k[4]) == (1, 0, b)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=9), min_size=7, max_size=7))
def test_cumulants_match_reversion_oracle(tail):
    coeffs = [Fraction(1)] + tail
    k = freefam.free_cumulants(VarianceSpec.from_series(coeffs), 8)
    assert k.k == oracles.reversion_cumulants(coeffs, 8)


def test_cumulants_need_enough_terms():
    with pytest.raises(InsufficientOrderError):
        freefam.free_cumulants(VarianceSpec.from_series([1, 1]), 8)


def test_free_power():
    spec = VarianceSpec.from_series([1, Fraction(1, 2)] + [0] * 5)
    assert freefam.free_power(spec, 1) == spec
    k1 = freefam.free_cumulants(spec, 6)
    k2 = freefam.free_cumulants(freefam.free_power(spec, 2), 6)
    for n in range(2, 7):
        # V -> V/lam rescales k_n by lam^(1-n)
        assert k2[n] == k1[n] * Fraction(1, 2) ** (n - 1)
    semi = freefam.free_cumulants(freefam.free_power(VarianceSpec.quadratic(1, 0, 0), 4), 6)
    assert semi.as_list() == [0, Fraction(1, 4), 0, 0, 0, 0]
    with pytest.raises(DomainError):
        freefam.free_power(spec, 0.5)
