"""Comprehensive Groebner systems over the parameter block of a ring.

Each step computes one Groebner basis of the ideal together with the current
segment equations, splits off the part of the segment where a pure-parameter
element is nonzero (the ideal specializes to <1> there), and otherwise splits
on the vanishing of the leading coefficients of a minimal basis.  Cases are
split disjointly, so the segments partition the parameter space.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .groebner import GroebnerBasis, buchberger, in_radical, normal_form, reduce_basis
from .polyring import Poly, PolyRing, embed_param, leading_data, mono_divides, specialize

log = logging.getLogger(__name__)

DEFAULT_MAX_DEPTH = 48


class CGSError(RuntimeError):
    pass


@dataclass
class Segment:
    """V(eq_gens) minus V(neq_gens); an empty ``neq_gens`` excludes nothing."""

    eq_gens: List[Poly]
    neq_gens: List[Poly]

    def contains(self, point: Sequence) -> bool:
        return point_in_segment(self, point)


@dataclass
class Branch:
    segment: Segment
    basis: List[Poly]
    index: int
    ring: Optional[PolyRing] = None

    def is_unit(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant()


@dataclass
class CGSResult:
    branches: List[Branch]
    ring: PolyRing
    system: List[Poly] = field(default_factory=list)
    order: str = "lex"

    @property
    def params(self) -> Tuple[str, ...]:
        return self.ring.param_names

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.ring.decision_names

    def locate(self, point: Sequence) -> List[Branch]:
        return [b for b in self.branches if point_in_segment(b.segment, point)]


def point_in_segment(s: Segment, point: Sequence) -> bool:
    for e in s.eq_gens:
        if e.evaluate(point):
            return False
    if not s.neq_gens:
        return True
    return any(n.evaluate(point) for n in s.neq_gens)


# ---------------------------------------------------------------------------
# construction


class _Builder:
    def __init__(self, ring: PolyRing, max_depth: int):
        self.ring = ring
        self.pring = ring.param_ring()
        self.max_depth = max_depth
        self.out: List[Tuple[List[Poly], List[Poly], List[Poly]]] = []

    def _normalize_neq(self, E: List[Poly], N: List[Poly]) -> Optional[List[Poly]]:
        """Reduce the excluded generators modulo E.

        Returns None when the segment V(E) minus V(N) is empty, [] when
        nothing is excluded.
        """
        EG = buchberger(E).generators if E else []
        if len(EG) == 1 and EG[0].is_constant():
            return None
        kept: List[Poly] = []
        for n in N:
            r = normal_form(n, EG) if EG else n
            if r.is_zero():
                continue
            if r.is_constant():
                return []
            r = r.monic()
            if E and in_radical(r, E):
                continue
            if r not in kept:
                kept.append(r)
        return kept or None

    def emit(self, E: List[Poly], N: List[Poly], basis: List[Poly]):
        neq = self._normalize_neq(E, N)
        if neq is None:
            return
        self.out.append((list(E), neq, basis))

    def run(self, F: List[Poly], E: List[Poly], N: List[Poly], depth: int):
        if depth > self.max_depth:
            raise CGSError(f"CGS recursion exceeded depth {self.max_depth} (segment eq={[str(e) for e in E]})")
        if self._normalize_neq(E, N) is None:
            return
        ring = self.ring
        nx = ring.ndecision
        G = buchberger(list(F) + [embed_param(e, ring) for e in E]).generators
        if len(G) == 1 and G[0].is_constant():
            self.emit(E, N, [ring.one()])
            return

        Gr = [g.to_ring(self.pring) for g in G if not any(g.lm()[:nx])]
        rest = [g for g in G if any(g.lm()[:nx])]
        if Gr:
            if not E or not all(in_radical(g, E) for g in Gr):
                # off V(Gr) the specialized ideal is <1>
                self.emit(E, [n * g for n in N for g in Gr], [ring.one()])
            E = Gr

        Gm = _minimal_dickson(rest)
        hs: List[Poly] = []
        for g in Gm:
            _, lc, _ = leading_data(g)
            if lc.is_constant():
                continue
            lc = lc.monic()
            if lc not in hs:
                hs.append(lc)

        prod = self.pring.one()
        for h in hs:
            prod = prod * h
        self.emit(E, [n * prod for n in N], Gm)

        excluded = list(N)
        for h in hs:
            self.run(G, E + [h], excluded, depth + 1)
            excluded = [n * h for n in excluded]


def _minimal_dickson(G: Sequence[Poly]) -> List[Poly]:
    """One element per minimal decision-variable leading monomial, preferring
    the simplest leading coefficient."""
    data = [(g, *leading_data(g)[:2]) for g in G]
    lms = {lm for _, lm, _ in data}
    minimal = [m for m in lms if not any(o != m and mono_divides(o, m) for o in lms)]
    chosen = []
    for m in sorted(minimal, reverse=True):
        cands = [(g, lc) for g, lm, lc in data if lm == m]
        g, _ = min(cands, key=lambda t: (not t[1].is_constant(), len(t[1]), t[1].degree(), t[0].lm()))
        chosen.append(g)
    return chosen


def compute_cgs(F: Sequence[Poly], max_depth: int = DEFAULT_MAX_DEPTH) -> CGSResult:
    """CGS of ``F`` over the parameter block of its ring."""
    F = [f for f in F if not f.is_zero()]
    if not F:
        raise ValueError("compute_cgs needs a nonzero polynomial")
    ring = F[0].ring
    if ring.nparams == 0:
        raise ValueError("ring has no parameters")
    b = _Builder(ring, max_depth)
    b.run(F, [], [b.pring.one()], 0)
    branches = [Branch(Segment(E, N), basis, i, ring) for i, (E, N, basis) in enumerate(b.out)]
    log.info("CGS: %d branches", len(branches))
    return CGSResult(branches, ring, list(F))


# ---------------------------------------------------------------------------
# specialization and validation


def specialize_branch(b: Branch, point: Sequence, check: bool = True) -> GroebnerBasis:
    """Specialize the branch basis at ``point`` (no Buchberger run).

    The result is inter-reduced so it is the reduced basis of the specialized
    ideal whenever the point lies in the segment.
    """
    if check and not point_in_segment(b.segment, point):
        raise ValueError(f"point {tuple(map(str, point))} is not in the segment of branch {b.index}")
    ring = b.basis[0].ring if b.basis else b.ring
    if not b.basis:
        return GroebnerBasis([], ring.decision_ring())
    dring = ring.decision_ring()
    spec = []
    for g in b.basis:
        lm, lc, _ = leading_data(g)
        if not lc.evaluate(point):
            raise ValueError(f"leading coefficient of basis element {g.lm()} vanishes in branch {b.index}")
        spec.append(specialize(g, point))
    return GroebnerBasis(reduce_basis(spec), dring)


@dataclass
class ValidationReport:
    samples: int = 0
    partition_violations: List[str] = field(default_factory=list)
    basis_mismatches: List[str] = field(default_factory=list)
    lc_violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.partition_violations or self.basis_mismatches or self.lc_violations)

    def summary(self) -> str:
        return (f"{self.samples} samples: {len(self.partition_violations)} partition, "
                f"{len(self.basis_mismatches)} basis, {len(self.lc_violations)} leading-coefficient violations")


def validate_specialization(c: CGSResult, samples: Sequence[Sequence]) -> ValidationReport:
    """Check the partition and specialization properties at each sample."""
    rep = ValidationReport()
    for point in samples:
        rep.samples += 1
        tag = "(" + ",".join(str(v) for v in point) + ")"
        hits = c.locate(point)
        if len(hits) != 1:
            rep.partition_violations.append(f"{tag}: in {len(hits)} segments {[b.index for b in hits]}")
            if not hits:
                continue
        b = hits[0]
        try:
            got = specialize_branch(b, point)
        except ValueError as exc:
            rep.lc_violations.append(f"{tag}: {exc}")
            continue
        want = buchberger([specialize(f, point) for f in c.system])
        if set(got.generators) != set(want.generators):
            rep.basis_mismatches.append(
                f"{tag}: branch {b.index} gives {len(got)} polys, direct basis has {len(want)}")
    return rep
