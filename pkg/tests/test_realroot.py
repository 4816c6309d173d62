import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cgsik import instrument
from cgsik.cgs import specialize_branch
from cgsik.exactnum import QS2
from cgsik.groebner import buchberger
from cgsik.kinematics import sample_targets
from cgsik.polyring import PolyRing
from cgsik.realroot import (
    CharPoly,
    char_poly,
    count_real_roots,
    count_signs,
    hermite_matrix,
    sign_sequences,
    sturm_count,
    univar_real_roots,
)

Rxy = PolyRing(("x", "y"))
x, y = Rxy.gens()
Ry = PolyRing(("y",))
Y = Ry.gen("y")
HALF = QS2(Fraction(1, 2))


def q(*vals):
    return [QS2(Fraction(v)) for v in vals]


@pytest.mark.parametrize("M,chi,count", [
    ([[2, 0], [0, 2]], (4, -4), 2),
    ([[2, 0], [0, -2]], (-4, 0), 0),
    ([[1, 0], [0, 0]], (0, -1), 1),
])
def test_char_poly_and_count(M, chi, count):
    c = char_poly([q(*row) for row in M])
    assert c.coeffs == q(*chi)
    assert count_real_roots(c) == count


def test_sign_sequences_example():
    plus, minus = sign_sequences(CharPoly(q(4, -4)))
    assert plus == q(1, -4, 4) and minus == q(1, 4, 4)
    sc = count_signs(CharPoly(q(4, -4)))
    assert (sc.s_plus, sc.s_minus, sc.count) == (2, 0, 2)


def test_hermite_of_circle_line():
    G = buchberger([x ** 2 + y ** 2 - 1, x - y])
    H = hermite_matrix(G)
    assert H.entries == [q(2, 0), q(0, 1)] and H.is_symmetric()
    chi = char_poly(H)
    assert chi.coeffs == q(2, -3) and count_real_roots(chi) == 2


def test_hermite_counts_complex_pair():
    G = buchberger([x ** 2 + 1, y - x])
    assert count_real_roots(char_poly(hermite_matrix(G))) == 0


def test_hermite_requires_zero_dimensional():
    with pytest.raises(ValueError):
        hermite_matrix(buchberger([x ** 2 + y ** 2 - 1]))


@pytest.mark.parametrize("coeffs,expected", [
    ([1, 0, -1], 2),
    ([1, 0, 1], 0),
    ([1, -2, 1], 1),
    ([1, 0, -2, 0, 1], 2),
    ([1, -1, -1, 1], 2),
])
def test_sturm_examples(coeffs, expected):
    assert sturm_count(coeffs) == expected


def test_sturm_interval():
    assert sturm_count([1, 0, -1], 0, None) == 1
    assert sturm_count([1, 0, -1], -1, 1) == 1  # (a, b]


def test_sturm_irrational_coefficients():
    # y^2 - 2 has roots +-sqrt 2; y - sqrt 2 has one
    assert sturm_count([QS2(1), QS2(0), QS2(-2)]) == 2
    assert sturm_count([QS2(1), QS2(0, -1)]) == 1


@pytest.mark.parametrize("coeffs,roots", [
    ([4, 0, -1], [-0.5, 0.5]),
    ([1, -4, 4], [2.0]),
    ([1, -1, -1, 1], [-1.0, 1.0]),
    ([1, 0, 1], []),
])
def test_univar_real_roots_examples(coeffs, roots):
    assert np.allclose(univar_real_roots(coeffs), roots, atol=1e-9)


def test_univar_golden():
    got = univar_real_roots([1, 0, -2, 1])
    want = sorted([1.0, (-1 + math.sqrt(5)) / 2, (-1 - math.sqrt(5)) / 2])
    assert np.allclose(got, want, atol=1e-12)


def test_univar_counts_and_errors():
    with instrument.watch() as delta:
        univar_real_roots([1, -1])
    assert delta[instrument.UNIVARIATE_SOLVE] == 1
    with pytest.raises(ValueError):
        univar_real_roots([0, 0])
    with pytest.raises(ValueError):
        univar_real_roots([3])


# ---------------------------------------------------------------------------
# Hermite against Sturm

def _product(factors):
    p = [QS2(1)]
    for f in factors:
        out = [QS2(0)] * (len(p) + len(f) - 1)
        for i, a in enumerate(p):
            for j, b in enumerate(f):
                out[i + j] = out[i + j] + a * b
        p = out
    return p


def _univar_poly(coeffs):
    n = len(coeffs) - 1
    p = Ry.zero()
    for i, c in enumerate(coeffs):
        p = p + Ry.const(c) * Y ** (n - i)
    return p


roots_q = st.fractions(min_value=-4, max_value=4, max_denominator=5)
factor = st.one_of(
    roots_q.map(lambda r: [QS2(1), QS2(-r)]),                                       # real root
    st.fractions(min_value=Fraction(1, 5), max_value=4, max_denominator=5).map(
        lambda c: [QS2(1), QS2(0), QS2(c)]),                                        # y^2 + c > 0
    st.sampled_from([[QS2(1), QS2(0), QS2(-2)], [QS2(1), QS2(0, -1)]]),            # +-sqrt 2, sqrt 2
)


@settings(max_examples=150)
@given(st.lists(factor, min_size=1, max_size=4))
def test_hermite_matches_sturm_univariate(factors):
    p = _product(factors)
    G = buchberger([_univar_poly(p)])
    chi = char_poly(hermite_matrix(G))
    assert count_real_roots(chi) == sturm_count(p)


@settings(max_examples=60)
@given(st.lists(factor, min_size=1, max_size=3), st.lists(st.integers(-3, 3), min_size=1, max_size=3))
def test_hermite_matches_sturm_triangular(factors, back):
    # x - h(y), q(y): one point per distinct root of q
    p = _product(factors)
    n = len(p) - 1
    qy = sum((Rxy.const(c) * y ** (n - i) for i, c in enumerate(p)), Rxy.zero())
    h = sum((Rxy.const(c) * y ** i for i, c in enumerate(back)), Rxy.zero())
    G = buchberger([x - h, qy])
    H = hermite_matrix(G)
    assert H.is_symmetric()
    chi = char_poly(H)
    assert count_real_roots(chi) == sturm_count(p)


@settings(max_examples=100)
@given(st.lists(factor, min_size=1, max_size=4))
def test_descartes_accounts_for_every_eigenvalue(factors):
    # the characteristic polynomial of a real symmetric matrix is real-rooted,
    # so sign changes account for all nonzero eigenvalues
    chi = char_poly(hermite_matrix(buchberger([_univar_poly(_product(factors))])))
    zeros = 0
    while zeros < chi.d and not chi.coeffs[zeros]:
        zeros += 1
    sc = count_signs(chi)
    assert sc.s_plus + sc.s_minus + zeros == chi.d


@settings(max_examples=100)
@given(st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=4), min_size=1, max_size=5, unique=True))
def test_univar_recovers_distinct_roots(rs):
    coeffs = np.poly([float(r) for r in rs])
    got = univar_real_roots(coeffs)
    assert np.allclose(got, sorted(float(r) for r in rs), atol=1e-6)


# ---------------------------------------------------------------------------
# stored parametric characteristic polynomials against specialized ones

def _branch_points(bb, axis):
    if axis:
        return [(t.z,) for t in sample_targets(25, 11, axis=True)]
    if not bb.branch.segment.eq_gens:
        return [(t.x, t.y, t.z) for t in sample_targets(25, 12)]
    # y = 0 branch
    return [(t.x, 0, t.z) for t in sample_targets(25, 13)]


def test_parametric_charpoly_commutes_with_specialization(ev3_bundle):
    checked = 0
    for axis, pool in ((False, ev3_bundle.main_branches), (True, ev3_bundle.axis_branches)):
        for bb in pool:
            assert bb.charpoly is not None
            pts = [p for p in _branch_points(bb, axis) if bb.branch.segment.contains(p)]
            assert len(pts) >= 20
            for p in pts:
                G = specialize_branch(bb.branch, p)
                assert bb.charpoly.evaluate(p).coeffs == char_poly(hermite_matrix(G)).coeffs
                checked += 1
    assert checked >= 60
