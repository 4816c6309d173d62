from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cgsik.exactnum import QS2
from cgsik.kinematics import IK_RING, build_ik_system
from cgsik.polyring import (
    Poly,
    PolyRing,
    RatFunc,
    format_poly,
    format_ratfunc,
    leading_data,
    lex_cmp,
    parse_poly,
    parse_ratfunc,
    specialize,
)

R = IK_RING
c1, s1, c4, s4, c7, s7, x, y, z = R.gens()
D = R.decision_ring()
dc1, ds1, dc4, ds4, dc7, ds7 = D.gens()
R2 = QS2(0, 1)


def mono(names):
    e = [0] * R.nvars
    for n in names:
        e[R.names.index(n)] += 1
    return tuple(e)


def test_difference_of_squares():
    assert (c1 + s1) * (c1 - s1) == c1 ** 2 - s1 ** 2


def test_f4_plus_one():
    f4 = build_ik_system()[3]
    assert f4 == s1 ** 2 + c1 ** 2 - 1
    assert f4 + 1 == s1 ** 2 + c1 ** 2


def test_parameter_coefficients_multiply():
    assert (x * c1) * (y * c1) == x * y * c1 ** 2


def test_ring_mismatch():
    other = PolyRing(("a", "b"))
    with pytest.raises(ValueError):
        c1 + other.gen("a")


def test_leading_data_f1():
    lm, lc, lt = leading_data(build_ik_system()[0])
    assert lm == mono(["c1", "c4", "s7"])[:6]
    # f1 = x - fk_x, and fk_x carries -112 c1 c4 s7
    assert lc == R.param_ring().const(112)
    assert lt == 112 * c1 * c4 * s7


def test_leading_data_f3():
    lm, lc, _ = leading_data(build_ik_system()[2])
    assert lm == mono(["c4", "c7"])[:6]
    assert lc == R.param_ring().const(-112)


def test_leading_data_parameter_lc():
    lm, lc, _ = leading_data(x * s7 + y)
    assert lm == mono(["s7"])[:6]
    assert lc == R.param_ring().gen("x")


def test_leading_data_zero():
    with pytest.raises(ValueError):
        leading_data(R.zero())


def test_specialize_f3_origin():
    got = specialize(build_ik_system()[2], (0, 0, 0))
    want = -112 * dc4 * dc7 - 136 * dc4 + 112 * ds4 * ds7 - 16 * ds4 - 104 - 44 * D.const(R2)
    assert got == want


def test_specialize_f1_origin():
    got = specialize(build_ik_system()[0], (0, 0, 0))
    want = 112 * dc1 * dc4 * ds7 - 16 * dc1 * dc4 + 112 * dc1 * ds4 * dc7 + 136 * dc1 * ds4 - D.const(QS2(0, 44)) * dc1
    assert got == want


def test_specialize_simple():
    assert specialize(x * c1 - y * s1, (1, 1, 0)) == dc1 - ds1


def test_specialize_dimension():
    with pytest.raises(ValueError):
        specialize(x * c1, (1, 2))


def test_lex_examples():
    assert lex_cmp(mono(["c1", "c4", "s7"]), mono(["c1", "s4", "c7"])) == 1
    assert lex_cmp(mono(["c7"]), mono(["s7"])) == 1
    assert lex_cmp(mono(["x"]), mono(["x"])) == 0


exps = st.tuples(*[st.integers(0, 3)] * R.nvars)


@given(exps, exps, exps)
def test_lex_compatible_with_multiplication(m1, m2, m):
    c = lex_cmp(m1, m2)
    mm1 = tuple(a + b for a, b in zip(m, m1))
    mm2 = tuple(a + b for a, b in zip(m, m2))
    assert lex_cmp(mm1, mm2) == c
    assert c == -lex_cmp(m2, m1)


coeffs = st.builds(QS2, st.fractions(-20, 20, max_denominator=7), st.fractions(-3, 3, max_denominator=3))
polys = st.dictionaries(exps, coeffs, max_size=5).map(lambda t: Poly.from_terms(R, t))
points = st.tuples(*[st.fractions(-50, 50, max_denominator=9)] * 3)


@settings(max_examples=500)
@given(polys, polys, points)
def test_specialize_is_homomorphism(p, q, pt):
    assert specialize(p * q, pt) == specialize(p, pt) * specialize(q, pt)
    assert specialize(p + q, pt) == specialize(p, pt) + specialize(q, pt)


dec_exps = st.tuples(*[st.integers(0, 3)] * 6, st.just(0), st.just(0), st.just(0))
const_lc_polys = st.dictionaries(dec_exps, coeffs, min_size=1, max_size=5).map(lambda t: Poly.from_terms(R, t)).filter(bool)


@given(const_lc_polys, const_lc_polys)
def test_leading_monomial_of_product(p, q):
    lp, cp, _ = leading_data(p)
    lq, cq, _ = leading_data(q)
    lpq, cpq, _ = leading_data(p * q)
    assert lpq == tuple(a + b for a, b in zip(lp, lq))
    assert cpq == cp * cq


@given(polys)
def test_codec_round_trip(p):
    text = format_poly(p)
    assert parse_poly(text, R) == p
    assert format_poly(parse_poly(text, R)) == text


def test_rendering_example():
    assert format_poly(2 * c1 * s7 ** 2 - x + QS2(1, -1)) == "2*c1*s7^2 + -1*x + (1-1*r2)"


@pytest.mark.parametrize("text", ["x + 1", "1*x + 1*x", "(2)*x", "1*x^1", "1*q", "0*x", "1 + 1*x"])
def test_parse_rejects_noncanonical(text):
    with pytest.raises(ValueError):
        parse_poly(text, R)


def test_ratfunc_normalizes_and_evaluates():
    P = R.param_ring()
    px, py = P.gen("x"), P.gen("y")
    r = RatFunc(px * py, [(2 * px + 2, 2), (P.const(4), 1)])
    assert r.den == ((px + 1, 2),)
    assert r.evaluate((1, 3, 0)) == QS2(Fraction(3, 64))
    with pytest.raises(ZeroDivisionError):
        r.evaluate((-1, 0, 0))
    text = format_ratfunc(r)
    assert parse_ratfunc(text, P) == r
