import pytest

from cgsik import pipeline
from cgsik.bundle import BundleError, dumps_bundle, load_bundle, loads_bundle, save_bundle
from cgsik.kinematics import sample_targets


@pytest.fixture(scope="module")
def text(ev3_bundle):
    return dumps_bundle(ev3_bundle)


def _lines(text):
    return text.split("\n")


def _replace_line(text, lineno, new):
    lines = _lines(text)
    lines[lineno - 1] = new
    return "\n".join(lines)


def _line_of(text, header, nth=0):
    return [i for i, l in enumerate(_lines(text), start=1) if l == header][nth]


def test_save_load_save_is_byte_identical(ev3_bundle, tmp_path):
    p1, p2 = tmp_path / "a.bundle", tmp_path / "b.bundle"
    save_bundle(ev3_bundle, p1)
    b = load_bundle(p1)
    save_bundle(b, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert [bb.index for bb in b.main_branches] == [0, 1]
    assert b.main_branches[0].charpoly.coeffs == ev3_bundle.main_branches[0].charpoly.coeffs


def test_loaded_bundle_solves_identically(ev3_bundle, text):
    b = loads_bundle(text)
    for t in sample_targets(5, 2):
        assert pipeline.solve(b, t).to_json() == pipeline.solve(ev3_bundle, t).to_json()


def test_deferred_charpoly_round_trip(ev3_bundle):
    bb = ev3_bundle.main_branches[0]
    b = pipeline.SolverBundle([pipeline.BundleBranch(bb.branch, None, bb.qbasis)], [], ev3_bundle.fingerprint)
    text = dumps_bundle(b)
    assert "[charpoly]\ndeferred\n" in text
    again = loads_bundle(text)
    assert again.main_branches[0].charpoly is None
    assert dumps_bundle(again) == text


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_bundle(tmp_path / "nope.bundle")


def test_fingerprint_mismatch(text):
    with pytest.raises(BundleError, match="fingerprint") as exc:
        loads_bundle(text, expect_fingerprint="0000000000000000")
    assert exc.value.line == 2


def test_version_mismatch(text):
    with pytest.raises(BundleError, match="version") as exc:
        loads_bundle(text.replace("cgsik-bundle v1", "cgsik-bundle v2", 1))
    assert exc.value.line == 1


@pytest.mark.parametrize("mutate,match", [
    (lambda t: t[: len(t) // 2], "truncated"),
    (lambda t: t[: t.index("[end]")], "end"),
    (lambda t: "hello\n" + t, "header"),
    (lambda t: t.replace("[basis]", "[bases]", 1), "unknown section"),
    (lambda t: t.replace("[basis]", "[basis]\n", 1), "blank line"),
    (lambda t: t.replace("[qbasis]\n1\n", "[qbasis]\n1\ns8\n", 1), "qbasis"),
    (lambda t: t.replace("[segment.eq]\n1*y\n", "[segment.eq]\ny\n", 1), "segment.eq"),
    (lambda t: t.replace("[axis]\n", "", 1), "axis"),
    (lambda t: t.replace("[end]\n", "[end]\n1\n"), "after"),
    (lambda t: t.replace("[branch 1]", "[branch 01]", 1), "malformed"),
])
def test_corruptions_are_rejected(text, mutate, match):
    with pytest.raises(BundleError, match=match):
        loads_bundle(mutate(text))


def test_charpoly_length_must_match_qbasis(text):
    k = _line_of(text, "[qbasis]")
    bad = "\n".join(l for i, l in enumerate(_lines(text), start=1) if i != k + 1)
    with pytest.raises(BundleError, match="charpoly coefficients"):
        loads_bundle(bad)


def test_error_carries_position(text):
    k = _line_of(text, "[basis]")
    bad = _replace_line(text, k + 1, "1*c1 +")
    with pytest.raises(BundleError) as exc:
        loads_bundle(bad)
    assert exc.value.line == k + 1 and exc.value.col == 1
    assert f"line {k + 1}" in str(exc.value)
