"""Text serialization of :class:`~cgsik.pipeline.SolverBundle`.

Grammar (UTF-8, one item per line, no blank lines)::

    cgsik-bundle v1
    fingerprint <hex>
    [branch <k>]          repeated for each main branch
    [segment.eq]          parameter polynomials, one per line
    [segment.neq]
    [basis]               parametric basis polynomials
    [charpoly]            a_0 .. a_{d-1} as rational functions, or `deferred`
    [qbasis]              standard monomials, ascending
    [axis]                axis branches follow, same layout
    [end]

Polynomials use the canonical rendering of :mod:`cgsik.polyring`; the parser
re-renders every item and rejects anything non-canonical, so a load/save
cycle is byte-identical.
"""

from __future__ import annotations

import re
from typing import List, Optional, Tuple

from .cgs import Branch, Segment
from .groebner import QuotientBasis
from .kinematics import AXIS_RING, IK_RING, table_fingerprint
from .pipeline import BundleBranch, SolverBundle
from .polyring import PolyRing, format_monomial, format_poly, format_ratfunc, parse_monomial, parse_poly, parse_ratfunc
from .realroot import CharPoly

FORMAT_VERSION = 1
HEADER = f"cgsik-bundle v{FORMAT_VERSION}"
BRANCH_SECTIONS = ("segment.eq", "segment.neq", "basis", "charpoly", "qbasis")
DEFERRED = "deferred"


class BundleError(ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + msg)


def _dump_branch(bb: BundleBranch, out: List[str]):
    b = bb.branch
    out.append(f"[branch {b.index}]")
    out.append("[segment.eq]")
    out.extend(format_poly(p) for p in b.segment.eq_gens)
    out.append("[segment.neq]")
    out.extend(format_poly(p) for p in b.segment.neq_gens)
    out.append("[basis]")
    out.extend(format_poly(p) for p in b.basis)
    out.append("[charpoly]")
    if bb.charpoly is None:
        out.append(DEFERRED)
    else:
        out.extend(format_ratfunc(c) for c in bb.charpoly.coeffs)
    out.append("[qbasis]")
    out.extend(format_monomial(m, b.ring.decision_names) for m in bb.qbasis.monomials)


def dumps_bundle(bundle: SolverBundle) -> str:
    out = [f"cgsik-bundle v{bundle.version}", f"fingerprint {bundle.fingerprint}"]
    for bb in bundle.main_branches:
        _dump_branch(bb, out)
    out.append("[axis]")
    for bb in bundle.axis_branches:
        _dump_branch(bb, out)
    out.append("[end]")
    return "\n".join(out) + "\n"


def save_bundle(bundle: SolverBundle, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_bundle(bundle))


_SECTION = re.compile(r"^\[([a-z.]+)(?: (0|[1-9][0-9]*))?\]$")


def _parse_branch_items(kind: str, items: List[Tuple[int, str]], ring: PolyRing):
    pring, dring = ring.param_ring(), ring.decision_ring()
    out = []
    for lineno, text in items:
        try:
            if kind in ("segment.eq", "segment.neq"):
                out.append(parse_poly(text, pring))
            elif kind == "basis":
                out.append(parse_poly(text, ring))
            elif kind == "charpoly":
                if text == DEFERRED:
                    if len(items) != 1:
                        raise ValueError("`deferred` must be the only charpoly line")
                    return None
                out.append(parse_ratfunc(text, pring))
            else:
                out.append(parse_monomial(text, dring))
        except (ValueError, ZeroDivisionError) as exc:
            raise BundleError(f"bad {kind} item: {exc}", lineno, 1) from None
    return out


def loads_bundle(text: str, expect_fingerprint: Optional[str] = None) -> SolverBundle:
    if expect_fingerprint is None:
        expect_fingerprint = table_fingerprint()
    if not text.endswith("\n"):
        raise BundleError("file does not end with a newline (truncated?)", text.count("\n") + 1, len(text) - text.rfind("\n"))
    lines = text[:-1].split("\n")
    if not lines or not lines[0].startswith("cgsik-bundle "):
        raise BundleError("missing `cgsik-bundle` header", 1, 1)
    if lines[0] != HEADER:
        raise BundleError(f"unsupported format version {lines[0][13:]!r} (expected v{FORMAT_VERSION})", 1, 14)
    if len(lines) < 2 or not lines[1].startswith("fingerprint "):
        raise BundleError("missing fingerprint line", 2, 1)
    fp = lines[1][len("fingerprint "):]
    if fp != expect_fingerprint:
        raise BundleError(f"model fingerprint mismatch: bundle {fp}, model {expect_fingerprint}", 2, 13)

    # group lines into sections
    sections: List[Tuple[int, str, Optional[int], List[Tuple[int, str]]]] = []
    for i, line in enumerate(lines[2:], start=3):
        if line.startswith("["):
            m = _SECTION.match(line)
            if not m:
                raise BundleError(f"malformed section header {line!r}", i, 1)
            name, num = m.group(1), m.group(2)
            if name not in BRANCH_SECTIONS + ("branch", "axis", "end"):
                raise BundleError(f"unknown section [{name}]", i, 2)
            if (name == "branch") != (num is not None):
                raise BundleError(f"bad section header {line!r}", i, 1)
            sections.append((i, name, int(num) if num is not None else None, []))
        else:
            if not sections:
                raise BundleError("content before the first section", i, 1)
            if line == "":
                raise BundleError("blank line", i, 1)
            sections[-1][3].append((i, line))

    if not sections or sections[-1][1] != "end":
        raise BundleError("missing [end] section (truncated file?)", len(lines), 1)
    if sections[-1][3]:
        raise BundleError("content after [end]", sections[-1][3][0][0], 1)

    main: List[BundleBranch] = []
    axis: List[BundleBranch] = []
    target, ring = main, IK_RING
    seen_axis = False
    k = 0
    while sections[k][1] != "end":
        lineno, name, num, items = sections[k]
        if name == "axis":
            if seen_axis or items:
                raise BundleError("misplaced [axis] section", lineno, 1)
            seen_axis = True
            target, ring = axis, AXIS_RING
            k += 1
            continue
        if name != "branch":
            raise BundleError(f"section [{name}] outside a branch", lineno, 1)
        if items:
            raise BundleError("content directly under [branch]", items[0][0], 1)
        parts = {}
        for j, want in enumerate(BRANCH_SECTIONS, start=1):
            if k + j >= len(sections) or sections[k + j][1] != want:
                where = sections[min(k + j, len(sections) - 1)][0]
                raise BundleError(f"branch {num}: expected [{want}]", where, 1)
            parts[want] = _parse_branch_items(want, sections[k + j][3], ring)
        qb = QuotientBasis(parts["qbasis"], ring.decision_names)
        chi = None if parts["charpoly"] is None else CharPoly(parts["charpoly"])
        if chi is not None and chi.d != qb.d:
            raise BundleError(f"branch {num}: {chi.d} charpoly coefficients for {qb.d} basis monomials", sections[k + 4][0], 1)
        if not parts["basis"]:
            raise BundleError(f"branch {num}: empty basis", sections[k + 3][0], 1)
        br = Branch(Segment(parts["segment.eq"], parts["segment.neq"]), parts["basis"], num, ring)
        target.append(BundleBranch(br, chi, qb))
        k += 1 + len(BRANCH_SECTIONS)
    if not seen_axis:
        raise BundleError("missing [axis] section", sections[-1][0], 1)
    return SolverBundle(main, axis, fp, FORMAT_VERSION)


def load_bundle(path, expect_fingerprint: Optional[str] = None) -> SolverBundle:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise FileNotFoundError(f"bundle not found: {path}") from None
    return loads_bundle(text, expect_fingerprint)
