import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cgsik.cgs import (
    Branch,
    CGSError,
    CGSResult,
    Segment,
    compute_cgs,
    point_in_segment,
    specialize_branch,
    validate_specialization,
)
from cgsik.kinematics import sample_targets
from cgsik.polyring import PolyRing, format_monomial, format_poly, leading_data

R1 = PolyRing(("X", "a"), nparams=1)
X, a = R1.gens()
P1 = R1.param_ring()
pa = P1.gen("a")

R2 = PolyRing(("X", "Y", "a", "b"), nparams=2)
X2, Y2, a2, b2 = R2.gens()


def _render(c):
    return [([format_poly(e) for e in b.segment.eq_gens], [format_poly(n) for n in b.segment.neq_gens],
             [format_poly(g) for g in b.basis]) for b in c.branches]


def test_linear_textbook():
    c = compute_cgs([a * X - 1])
    assert _render(c) == [
        ([], ["1*a"], ["1*X*a + -1"]),
        (["1*a"], [], ["1"]),
    ]
    assert c.params == ("a",) and c.variables == ("X",)


def test_parameter_free_ideal():
    c = compute_cgs([a * X ** 2 + X, X ** 2])
    assert _render(c) == [([], [], ["1*X"])]


def test_constant_leading_coefficient_single_branch():
    c = compute_cgs([X ** 2 + a])
    assert len(c.branches) == 1 and c.branches[0].segment.neq_gens == []


def test_conic_pair_segments():
    c = compute_cgs([X2 ** 2 + a2 * Y2 ** 2 - 1, X2 * Y2 - b2])
    eqs = [tuple(e) for e, _, _ in _render(c)]
    assert eqs == [(), ("1*b",), ("1*a", "1*b"), ("1*a",)]
    # a = b = 0: X^2 = 1 and XY = 0
    assert _render(c)[2][2] == ["1*X^2 + -1", "1*Y"]


def test_compute_cgs_rejects_bad_input():
    with pytest.raises(ValueError):
        compute_cgs([R1.zero()])
    with pytest.raises(ValueError):
        compute_cgs([PolyRing(("X",)).gen("X")])


def test_depth_cap():
    with pytest.raises(CGSError):
        compute_cgs([X2 ** 2 + a2 * Y2 ** 2 - 1, X2 * Y2 - b2], max_depth=0)


@pytest.mark.parametrize("eq,neq,point,inside", [
    ([], [], (5,), True),
    ([], [pa], (0,), False),
    ([], [pa], (2,), True),
    ([pa], [], (0,), True),
    ([pa], [], (1,), False),
    ([pa * (pa - 1)], [pa], (1,), True),
    ([pa * (pa - 1)], [pa], (0,), False),
])
def test_point_in_segment(eq, neq, point, inside):
    assert point_in_segment(Segment(eq, neq), point) is inside


def test_specialize_branch_examples():
    c = compute_cgs([a * X - 1])
    G = specialize_branch(c.branches[0], (Fraction(2),))
    assert [format_poly(g) for g in G] == ["1*X + -1/2"]
    with pytest.raises(ValueError):
        specialize_branch(c.branches[0], (0,))
    assert specialize_branch(c.branches[1], (0,)).is_unit()


def test_specialize_branch_rejects_vanishing_lc_without_check():
    c = compute_cgs([a * X - 1])
    with pytest.raises(ValueError, match="leading coefficient"):
        specialize_branch(c.branches[0], (0,), check=False)


small_q = st.one_of(st.just(Fraction(0)), st.fractions(min_value=-5, max_value=5, max_denominator=7))


@settings(max_examples=200)
@given(small_q, small_q)
def test_conic_pair_specialization_property(av, bv):
    c = _conic()
    rep = validate_specialization(c, [(av, bv)])
    assert rep.ok, rep.summary()


_CONIC = []


def _conic():
    if not _CONIC:
        _CONIC.append(compute_cgs([X2 ** 2 + a2 * Y2 ** 2 - 1, X2 * Y2 - b2]))
    return _CONIC[0]


def test_validation_catches_corrupted_basis():
    c = _conic()
    b0 = c.branches[0]
    bad = Branch(b0.segment, b0.basis[:-1], b0.index, b0.ring)
    broken = CGSResult([bad] + c.branches[1:], c.ring, c.system)
    rep = validate_specialization(broken, [(Fraction(1), Fraction(2))])
    assert rep.basis_mismatches and not rep.ok


def test_validation_catches_overlapping_segments():
    c = _conic()
    broken = CGSResult(c.branches + [c.branches[0]], c.ring, c.system)
    rep = validate_specialization(broken, [(Fraction(1), Fraction(2))])
    assert rep.partition_violations


def _ev3_points(n_sampled, n_box, seed):
    pts = [(t.x, t.y, t.z) for t in sample_targets(n_sampled, seed)]
    rng = random.Random(seed)
    pts += [tuple(Fraction(rng.randint(-600, 600), rng.randint(1, 9)) for _ in range(3)) for _ in range(n_box)]
    pts += [(t.x, 0, t.z) for t in sample_targets(4, seed + 1)]
    pts += [(0, 0, t.z) for t in sample_targets(4, seed + 2, axis=True)]
    pts.append((0, 0, 0))
    return pts


def test_ev3_cgs_partition_and_specialization(ev3_cgs):
    assert len(ev3_cgs.branches) == 16
    rep = validate_specialization(ev3_cgs, _ev3_points(20, 10, 7))
    assert rep.ok, rep.summary()


def test_ev3_generic_branch_shape(ev3_cgs):
    b = ev3_cgs.branches[0]
    assert b.segment.eq_gens == []
    names = b.ring.names
    lms = [format_monomial(leading_data(g)[0], b.ring.decision_names) for g in b.basis]
    assert lms == ["c1", "s1", "c4", "s4", "c7", "s7^4"]
    assert "x" in names and "y" in names
