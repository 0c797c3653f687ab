import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varfam import freefam, qfam
from varfam.errors import DegenerateCaseError, DomainError, InsufficientOrderError, InvariantError
from varfam.measures import VarianceSpec

import oracles


def test_params_validation():
    with pytest.raises(InvariantError):
        qfam.QExpParams(1.0)
    with pytest.raises(InvariantError):
        qfam.QExpParams(0.5, 0.0, -0.6)
    with pytest.raises(DegenerateCaseError):
        qfam.QExpParams(0.5, 0.0, -1 / 1.5)


def test_q_derivative_reexport():
    assert qfam.q_derivative(lambda x: x**3, 0.5, 2.0) == pytest.approx(7.0, rel=1e-15)


def test_q_weight_trivial_cases():
    p = qfam.QExpParams(0.5, 0.2, 0.1)
    assert qfam.q_weight(p, 0.0, 1.7) == 1.0


@pytest.mark.parametrize("a,b", [(0.0, 0.0), (0.3, 0.2), (-0.5, 1.0), (1.0, -0.5)])
@pytest.mark.parametrize("m,u", [(0.1, -1.0), (0.2, 0.5), (-0.15, 1.5)])
def test_q_weight_at_zero_q_is_free_weight(a, b, m, u):
    w = qfam.q_weight(qfam.QExpParams(0.0, a, b), m, u)
    assert w == pytest.approx((1 + a * m + b * m * m) / (1 + (a - u) * m + (b + 1) * m * m), rel=1e-15)
    assert w == pytest.approx(freefam.free_weight(VarianceSpec.quadratic(1, a, b), m, u), rel=1e-15)


def test_q_weight_mean_identity():
    q, a, b, m, u = 0.5, 0.2, 0.1, 0.3, 1.0
    p = qfam.QExpParams(q, a, b)
    lhs = qfam.q_derivative(lambda mm: qfam.q_weight(p, mm, u), q, m)
    rhs = qfam.q_weight(p, m, u) * (u - m) / p.variance(m)
    assert abs(lhs - rhs) < 1e-10


def test_q_weight_rejects_outside_domain():
    p = qfam.QExpParams(0.5, 0.2, 0.1)
    with pytest.raises(DomainError):
        qfam.q_weight(p, 5.0, 10.0)


def test_asc_system_first_polynomials():
    sys = qfam.asc_system(qfam.QExpParams(Fraction(1, 2), Fraction(1, 4), Fraction(1, 2)), 4)
    polys = sys.polynomials(2)
    assert polys[1] == (0, 1)
    assert polys[2] == (-1, -Fraction(1, 4), 1)
    assert isinstance(sys.alpha[1], Fraction)


def test_asc_system_positive_beta():
    sys = qfam.asc_system(qfam.QExpParams(0.7, 1.0, -0.2), 50)
    assert all(b > 0 for b in sys.beta[1:])


def test_asc_system_depth_check():
    sys = qfam.asc_system(qfam.QExpParams(0.5), 3)
    with pytest.raises(InsufficientOrderError):
        sys.polynomials(6)
    with pytest.raises(InsufficientOrderError):
        qfam.moments_from_jacobi(sys, 20)


def test_low_moments():
    sys = qfam.asc_system(qfam.QExpParams(0.5, 0.3, 0.2), 8)
    assert qfam.moments_from_jacobi(sys, 0) == 1
    assert qfam.moments_from_jacobi(sys, 1) == 0
    assert qfam.moments_from_jacobi(sys, 2) == 1


@pytest.mark.parametrize("q,a,b", [(0.5, 0.3, 0.2), (-0.4, 1.0, 0.5), (0.0, 0.0, 0.0)])
def test_moments_match_dense_matrix_power(q, a, b):
    sys = qfam.asc_system(qfam.QExpParams(q, a, b), 12)
    alpha = [float(x) for x in sys.alpha]
    beta = [float(x) for x in sys.beta]
    for n in range(9):
        assert float(qfam.moments_from_jacobi(sys, n)) == pytest.approx(
            oracles.jacobi_moments_numpy(alpha, beta, n), rel=1e-12, abs=1e-12
        )


def test_semicircle_catalan_moments():
    sys = qfam.asc_system(qfam.QExpParams(0.0), 10)
    catalan = [1, 1, 2, 5, 14, 42]
    for k, c in enumerate(catalan):
        assert qfam.moments_from_jacobi(sys, 2 * k) == c
        assert qfam.moments_from_jacobi(sys, 2 * k + 1) == 0


def test_gauss_rule_integrates_moments():
    sys = qfam.asc_system(qfam.QExpParams(0.5, 0.3, 0.2), 30)
    x, w = sys.gauss_rule(30)
    for n in range(10):
        assert float(np.sum(w * x**n)) == pytest.approx(float(qfam.moments_from_jacobi(sys, n)), rel=1e-11, abs=1e-12)


def test_generating_check_examples():
    p = qfam.QExpParams(0.5, 0.0, 0.0)
    assert qfam.generating_check(p, 0.0, 1.0, 12) == 0.0
    assert qfam.generating_check(p, 0.1, 1.0, 12) < 1e-10


def test_generating_check_convergence_order():
    p = qfam.QExpParams(0.5, 0.0, 0.0)
    n = 4
    r1 = qfam.generating_check(p, 0.04, 1.0, n)
    r2 = qfam.generating_check(p, 0.02, 1.0, n)
    assert r2 / r1 == pytest.approx(2.0 ** -(n + 1), rel=0.1)


def test_support_interval():
    assert qfam.support_interval(qfam.QExpParams(0.0)) == pytest.approx((-2.0, 2.0))
    r = 2 * math.sqrt(2)
    assert qfam.support_interval(qfam.QExpParams(0.5)) == pytest.approx((-r, r))


def test_support_matches_free_meixner_zeros():
    lo, hi = qfam.support_interval(qfam.QExpParams(0.0, 0.3, 0.2))
    law = freefam.free_meixner(0.3, 0.2)
    assert law.ac_support == pytest.approx((lo, hi), abs=1e-14)
    assert law.density(lo + 1e-12) < 1e-5
    assert law.density(hi - 1e-12) < 1e-5
    assert law.density(0.5 * (lo + hi)) > 0.05


@pytest.mark.parametrize("q,a,b", [(0.5, 0.2, 0.1), (-0.3, 0.0, 0.4), (0.8, -0.5, 0.0)])
def test_q_family_moments(q, a, b):
    p = qfam.QExpParams(q, a, b)
    lo, hi = qfam.admissible_interval(p)
    for m in (0.5 * lo, 0.0, 0.5 * hi):
        member = qfam.q_family(p, m)
        w = member.measure.masses
        x = member.measure.locations
        mass = float(np.sum(w))
        mean = float(np.sum(w * x))
        var = float(np.sum(w * (x - mean) ** 2))
        assert mass == pytest.approx(1.0, abs=1e-8)
        assert mean == pytest.approx(m, abs=1e-8)
        assert var == pytest.approx(p.variance(m), abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(
    st.floats(-0.8, 0.8),
    st.floats(-1.0, 1.0),
    st.floats(0.0, 1.0),
    st.floats(-0.9, 0.9),
    st.floats(-1.0, 1.0),
)
def test_q_weight_mean_identity_property(q, a, b, t, s):
    p = qfam.QExpParams(q, a, b)
    lo, hi = qfam.admissible_interval(p, nodes=40)
    m = t * (hi if t > 0 else -lo) * 0.8
    if abs(m) < 1e-6:
        return
    slo, shi = qfam.support_interval(p)
    u = 0.5 * (slo + shi) + 0.5 * s * (shi - slo)
    w = qfam.q_weight(p, m, u)
    lhs = qfam.q_derivative(lambda mm: qfam.q_weight(p, mm, u), q, m)
    rhs = w * (u - m) / p.variance(m)
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(w))
