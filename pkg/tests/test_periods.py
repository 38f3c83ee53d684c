import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from k3lab.galedisc import LaurentPoly
from k3lab.periods import (
    ModularRingData,
    NilCohClass,
    TruncSeries2,
    WeightedPoint,
    appell_f4,
    blowup_map_A0,
    branch_locus_check,
    eta1_coeffs,
    f4_coefficient,
    gauss_2f1,
    gauss_2f1_derivs,
    gkz_recurrence_check,
    hilbert_relation_degree_check,
    ifunction_FG,
    ifunction_FG_oracle,
    indeterminacy_check,
    lambda_mu_from_xy,
    period_map_A0,
    wproj_homogeneity_check,
)
from k3lab.registry import get_case

A, B = Fraction(1, 3), Fraction(2, 3)
ROWS0 = get_case("A0").torus_rows
ROWS1 = get_case("A1").torus_rows


def test_gauss_basics():
    assert gauss_2f1(A, B, 1, 0)[0] == 1
    v1 = gauss_2f1(A, B, 1, 1e-6)[0]
    assert abs((v1 - 1) / 1e-6 - 2 / 9) < 1e-6
    with pytest.raises(ValueError, match="outside radius"):
        gauss_2f1(A, B, 1, 1.5)
    with pytest.raises(ValueError):
        gauss_2f1(A, B, -2, 0.1)


@given(st.floats(-0.9, 0.9), st.floats(-0.3, 0.3))
def test_gauss_against_mpmath(x, y):
    z = complex(x, y)
    if abs(z) >= 0.95:
        return
    ours = gauss_2f1(A, B, 1, z)[0]
    ref = complex(mpmath.hyp2f1(mpmath.mpf(1) / 3, mpmath.mpf(2) / 3, 1, z))
    assert abs(ours - ref) < 1e-12 * max(1, abs(ref))


@pytest.mark.parametrize("x", [0.3, -0.4, 0.2 + 0.3j])
def test_gauss_ode_residual(x):
    u, du, d2u = gauss_2f1_derivs(A, B, 1, x)
    assert abs(x * (1 - x) * d2u + (1 - 2 * x) * du - 2 / 9 * u) < 1e-8


def test_appell_basics():
    assert appell_f4(A, B, 1, 1, 0, 0)[0] == 1
    with pytest.raises(ValueError, match="domain"):
        appell_f4(A, B, 1, 1, 0.5, 0.5)
    x, y = 0.1, 0.07
    lhs = appell_f4(A, B, 1, 1, x * (1 - y), y * (1 - x))[0]
    rhs = gauss_2f1(A, B, 1, x)[0] * gauss_2f1(A, B, 1, y)[0]
    assert abs(lhs - rhs) < 1e-10


@pytest.mark.parametrize("z,w", [(0.05, 0.02), (-0.1, 0.03), (0.01j, -0.04)])
def test_appell_against_mpmath(z, w):
    ref = complex(mpmath.appellf4(mpmath.mpf(1) / 3, mpmath.mpf(2) / 3, 1, 1, z, w))
    assert abs(appell_f4(A, B, 1, 1, z, w)[0] - ref) < 1e-12


def test_factorization_grid():
    grid = [0.01 + 0.035 * k for k in range(5)]
    for x in grid:
        for y in grid:
            lhs = appell_f4(A, B, 1, 1, x * (1 - y), y * (1 - x))[0]
            rhs = gauss_2f1(A, B, 1, x)[0] * gauss_2f1(A, B, 1, y)[0]
            assert abs(lhs - rhs) / abs(rhs) < 1e-10


def test_eta1_values():
    eta = eta1_coeffs(12)
    assert eta[(0, 0)] == 1 and eta[(1, 0)] == -6 and eta[(1, 1)] == 360
    assert all(eta[(n, m)] == eta[(m, n)] for n, m in eta.keys())


def test_f4_coefficients_equal_eta1():
    eta = eta1_coeffs(8)
    for n in range(9):
        for m in range(9 - n):
            c = f4_coefficient(A, B, 1, 1, n, m, -27, -27)
            f = math.factorial
            oracle = Fraction((-1) ** (n + m) * f(3 * n + 3 * m), f(n) ** 2 * f(m) ** 2 * f(n + m))
            assert c == oracle == eta[(n, m)]


def test_eta1_numeric_through_xy():
    """eta1 at (lambda, mu) from (x, y) equals 2F1(x) 2F1(y)."""
    x, y = 0.05, 0.03
    lam, mu = lambda_mu_from_xy(x, y)
    eta = eta1_coeffs(40)
    s = sum(float(c) * lam ** n * mu ** m for (n, m), c in eta.coeffs.items())
    assert abs(s - (gauss_2f1(A, B, 1, x)[0] * gauss_2f1(A, B, 1, y)[0]).real) < 1e-12


def test_gkz_recurrences():
    eta = eta1_coeffs(10)
    assert all(r.status == "pass" for r in gkz_recurrence_check(ROWS1, eta, a0_twist=True))
    for rows in (ROWS0, ROWS1):
        F, _ = ifunction_FG(rows, 10)
        assert all(r.status == "pass" for r in gkz_recurrence_check(rows, F))
    const = TruncSeries2(10, {(n, m): 1 for n in range(11) for m in range(11 - n)})
    assert all(r.status == "fail" for r in gkz_recurrence_check(ROWS1, const))


def test_gkz_ratio_oracle():
    eta = eta1_coeffs(11)
    for n in range(10):
        for m in range(10 - n):
            k = 3 * (n + m)
            ratio = Fraction(-(k + 1) * (k + 2) * (k + 3), (n + 1) ** 2 * (n + m + 1))
            assert eta[(n + 1, m)] == ratio * eta[(n, m)]


@pytest.mark.parametrize("rows", [ROWS0, ROWS1])
def test_ifunction_against_cohomology_product(rows):
    F, (G1, G2) = ifunction_FG(rows, 8)
    Fo, G1o, G2o = ifunction_FG_oracle(rows, 8)
    for S, O in ((F, Fo), (G1, G1o), (G2, G2o)):
        assert {k: v for k, v in S.coeffs.items() if v} == {k: v for k, v in O.items() if v}
    assert F[(0, 0)] == 1 and G1[(0, 0)] == 0 and G2[(0, 0)] == 0


def test_ifunction_a1_values():
    F, (G1, _) = ifunction_FG(ROWS1, 10)
    eta = eta1_coeffs(10)
    assert all(F[k] == abs(eta[k]) for k in eta.keys())
    assert all(eta[k] == (-1) ** (3 * sum(k)) * F[k] for k in eta.keys())
    assert F[(1, 0)] == 6 and G1[(1, 0)] == 15


def test_nilcoh_inverse():
    x = NilCohClass.linear(3, 1, 2, 4)
    one = x * x.inverse_scalar_unit()
    assert one.component((0, 0)) == {(0, 0): 1}
    assert not any(one.component(b) for b in ((1, 0), (0, 1), (1, 1)))


def test_period_map_a0():
    assert period_map_A0(Fraction(0), Fraction(0)).coords == (1, 0, 0)
    P = period_map_A0(Fraction(1, 2), Fraction(1))
    assert P.coords == (1, 800, -3200000)
    with pytest.raises(ValueError, match="indeterminacy center"):
        period_map_A0(Fraction(1, 4), Fraction(1))
    f = period_map_A0(0.5, 1.0)
    assert abs(f.coords[1] - 800) < 1e-9


@given(st.fractions(-5, 5, max_denominator=7), st.fractions(-5, 5, max_denominator=7),
       st.fractions(-5, 5, max_denominator=7), st.fractions(1, 4, max_denominator=5))
def test_blowup_map_equivariance(nu, lam, mu, t):
    comps = blowup_map_A0()
    src = (nu, lam, mu)
    img = [c(src) for c in comps]
    if all(v == 0 for v in img):
        return
    scaled = [c(tuple(x * t ** w for x, w in zip(src, (1, 2, 5)))) for c in comps]
    assert scaled == [v * t ** (2 * w) for v, w in zip(img, (1, 3, 5))]


def test_weighted_homogeneity():
    assert wproj_homogeneity_check(blowup_map_A0(), (1, 2, 5), (1, 3, 5)) == 2
    ident = [LaurentPoly.monomial(e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    assert wproj_homogeneity_check(ident, (1, 2, 5), (1, 2, 5)) == 1
    broken = blowup_map_A0()[:2] + [LaurentPoly({(1, 0, 1): -3125})]
    assert wproj_homogeneity_check(broken, (1, 2, 5), (1, 3, 5)) is None
    dropped = [LaurentPoly({(0, 1, 0): 1})] + blowup_map_A0()[1:]
    assert wproj_homogeneity_check(dropped, (1, 2, 5), (1, 3, 5)) == 2


def test_indeterminacy_and_relation():
    assert indeterminacy_check().status == "pass"
    reps = hilbert_relation_degree_check()
    assert len(reps) == 8 and all(r.status == "pass" for r in reps)
    R = ModularRingData()
    assert R.relation.terms[(0, 5, 0, 0)] == 1728
    assert R.relation.terms[(0, 0, 0, 2)] == 144


def test_branch_locus_exact():
    from k3lab.galedisc import PoleError, horn_kapranov, sample_points

    pts = []
    for lam in sample_points(11, 40):
        try:
            pt = horn_kapranov(ROWS0, lam)
        except PoleError:
            continue
        if pt[0] != Fraction(1, 4):
            pts.append(pt)
    reps = branch_locus_check(pts[:10])
    assert len(reps) == 10 and all(r.status == "pass" for r in reps)
    assert branch_locus_check([(Fraction(1, 3), Fraction(1, 5))])[0].status == "fail"


def test_weighted_point():
    p = WeightedPoint((Fraction(2), Fraction(8), Fraction(32)), (1, 3, 5))
    assert p.equivalent(WeightedPoint((1, 1, 1), (1, 3, 5)))
    with pytest.raises(ValueError):
        WeightedPoint((0, 0), (1, 2))
