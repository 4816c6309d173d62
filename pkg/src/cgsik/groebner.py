"""Groebner bases over Q(sqrt 2) in lex order.

Plain Buchberger with the Gebauer-Moeller installation of the coprime and
chain criteria.  Bases are returned reduced (monic, inter-reduced) and sorted
by decreasing leading monomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from . import instrument
from .exactnum import ONE, QS2
from .polyring import (
    Monomial,
    Poly,
    PolyRing,
    format_monomial,
    mono_divides,
    mono_lcm,
)


@dataclass
class GroebnerBasis:
    generators: List[Poly]
    ring: PolyRing
    order: str = "lex"

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def __getitem__(self, i):
        return self.generators[i]

    def is_unit(self) -> bool:
        return len(self.generators) == 1 and self.generators[0].is_constant()

    def leading_monomials(self) -> List[Monomial]:
        return [g.lm() for g in self.generators]


@dataclass
class QuotientBasis:
    monomials: List[Monomial]
    names: Tuple[str, ...] = field(default=())

    @property
    def d(self) -> int:
        return len(self.monomials)

    def __len__(self):
        return len(self.monomials)

    def __str__(self):
        return ", ".join(format_monomial(m, self.names) for m in self.monomials)


def _reduce_terms(r: Dict[Monomial, QS2], leads, full: bool = True) -> Dict[Monomial, QS2]:
    """Reduce the term dict ``r`` in place by ``leads`` = [(lm, lc_inv, terms)]."""
    rem: Dict[Monomial, QS2] = {}
    while r:
        m = max(r)
        c = r[m]
        for lm, lc_inv, gterms in leads:
            for a, b in zip(lm, m):
                if a > b:
                    break
            else:
                q = c * lc_inv
                shift = tuple(b - a for a, b in zip(lm, m))
                for mg, cg in gterms.items():
                    mm = tuple(a + b for a, b in zip(mg, shift))
                    v = r.get(mm)
                    if v is None:
                        r[mm] = -(q * cg)
                    else:
                        v = v - q * cg
                        if v:
                            r[mm] = v
                        else:
                            del r[mm]
                break
        else:
            if not full:
                rem.update(r)
                return rem
            rem[m] = c
            del r[m]
    return rem


def _leads(G: Sequence[Poly]):
    return [(g.lm(), g.lc().inverse(), g.terms) for g in G]


def normal_form(p: Poly, G: Sequence[Poly]) -> Poly:
    """Remainder of multivariate division of ``p`` by ``G``.

    At each step the leading remaining term is reduced by the first element of
    ``G`` (in list order) whose leading monomial divides it.
    """
    G = [g for g in G if not g.is_zero()]
    if not G:
        raise ValueError("normal_form needs a nonempty list of nonzero divisors")
    for g in G:
        if g.ring != p.ring:
            raise ValueError("ring mismatch in normal_form")
    return Poly(p.ring, _reduce_terms(dict(p.terms), _leads(G)))


def s_polynomial(f: Poly, g: Poly) -> Poly:
    lf, lg = f.lm(), g.lm()
    l = mono_lcm(lf, lg)
    a = f.mul_term(tuple(x - y for x, y in zip(l, lf)), f.lc().inverse())
    b = g.mul_term(tuple(x - y for x, y in zip(l, lg)), g.lc().inverse())
    return a - b


def _coprime(m1: Monomial, m2: Monomial) -> bool:
    for a, b in zip(m1, m2):
        if a and b:
            return False
    return True


class _Engine:
    """Buchberger loop; pairs are taken by (degree of lcm, lcm) which on
    homogeneous input processes the ideal degree by degree."""

    def __init__(self, ring: PolyRing):
        self.ring = ring
        self.polys: List[Poly] = []
        self.lms: List[Monomial] = []
        self.active: List[int] = []
        self.pairs: List[Tuple[Tuple, int, int]] = []

    def add(self, h: Poly):
        k = len(self.polys)
        self.polys.append(h)
        lh = h.lm()
        self.lms.append(lh)
        lms = self.lms

        # Gebauer-Moeller UPDATE: prune the new pairs (h, g)
        C = [(g, mono_lcm(lms[g], lh)) for g in self.active]
        D = []
        while C:
            g, l = C.pop(0)
            if _coprime(lms[g], lh) or not (
                any(mono_divides(l2, l) for _, l2 in C)
                or any(mono_divides(l2, l) for _, l2 in D)
            ):
                D.append((g, l))
        new_pairs = [((sum(l), l, g, k), g, k) for g, l in D if not _coprime(lms[g], lh)]

        # chain criterion on the old pairs
        old = []
        for key, i, j in self.pairs:
            lij = key[1]
            if mono_divides(lh, lij):
                if mono_lcm(lms[i], lh) != lij and mono_lcm(lms[j], lh) != lij:
                    continue
            old.append((key, i, j))
        self.pairs = old + new_pairs
        self.active = [g for g in self.active if not mono_divides(lh, lms[g])] + [k]

    def _reduce(self, f: Poly) -> Poly:
        basis = sorted((self.polys[t] for t in self.active), key=lambda g: (len(g), g.lm()))
        return Poly(self.ring, _reduce_terms(dict(f.terms), _leads(basis)))

    def run(self, inputs: Sequence[Poly]) -> List[Poly]:
        for f in inputs:
            if self.active:
                f = self._reduce(f)
            if f.is_zero():
                continue
            f = f.monic()
            if f.is_constant():
                return [self.ring.one()]
            self.add(f)
        while self.pairs:
            best = min(range(len(self.pairs)), key=lambda t: self.pairs[t][0])
            _, i, j = self.pairs.pop(best)
            h = self._reduce(s_polynomial(self.polys[i], self.polys[j]))
            if h.is_zero():
                continue
            h = h.monic()
            if h.is_constant():
                return [self.ring.one()]
            self.add(h)
        return [self.polys[t] for t in self.active]


def _is_homogeneous(f: Poly) -> bool:
    degs = {sum(m) for m in f.terms}
    return len(degs) <= 1


def _homogenize(F: Sequence[Poly]):
    ring = F[0].ring
    hring = PolyRing(ring.names + ("_h",))
    out = []
    for f in F:
        d = f.degree()
        out.append(Poly(hring, {m + (d - sum(m),): c for m, c in f.terms.items()}))
    return hring, out


def _dehomogenize(g: Poly, ring: PolyRing) -> Poly:
    terms: Dict[Monomial, QS2] = {}
    for m, c in g.terms.items():
        k = m[:-1]
        v = terms.get(k)
        terms[k] = c if v is None else v + c
    return Poly(ring, {m: c for m, c in terms.items() if c})


def reduce_basis(G: Sequence[Poly]) -> List[Poly]:
    """Minimalize and inter-reduce a Groebner basis; monic, decreasing LM."""
    G = [g.monic() for g in G if not g.is_zero()]
    if any(g.is_constant() for g in G):
        return [G[0].ring.one()]
    G.sort(key=lambda g: g.lm())
    minimal: List[Poly] = []
    for g in G:
        if not any(mono_divides(h.lm(), g.lm()) for h in minimal):
            minimal.append(g)
    out = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        if others:
            lt = {g.lm(): g.lc()}
            tail = dict(g.terms)
            del tail[g.lm()]
            rest = _reduce_terms(tail, _leads(others))
            rest.update(lt)
            g = Poly(g.ring, rest)
        out.append(g)
    out.sort(key=lambda g: g.lm(), reverse=True)
    return out


def buchberger(F: Sequence[Poly], homogenize: bool = True) -> GroebnerBasis:
    """Reduced lex Groebner basis of the ideal generated by ``F``.

    Inhomogeneous input is homogenized with a trailing variable that sits
    below every other one in lex; the basis of the homogenized ideal is built
    degree by degree and dehomogenizes to a lex basis of the original ideal.
    Plain lex selection on these systems produces long chains of
    high-degree intermediate polynomials.
    """
    F = list(F)
    if not F:
        raise ValueError("buchberger needs at least one polynomial")
    ring = F[0].ring
    for f in F:
        if f.ring != ring:
            raise ValueError("ring mismatch in buchberger")
    instrument.bump(instrument.BUCHBERGER)
    nonzero = [f for f in F if not f.is_zero()]
    if not nonzero:
        return GroebnerBasis([], ring)
    if homogenize and not all(_is_homogeneous(f) for f in nonzero):
        hring, hom = _homogenize(nonzero)
        hom.sort(key=lambda f: (f.degree(), f.lm()))
        G = [_dehomogenize(g, ring) for g in _Engine(hring).run(hom)]
    else:
        nonzero.sort(key=lambda f: (f.degree(), f.lm()))
        G = _Engine(ring).run(nonzero)
    return GroebnerBasis(reduce_basis(G), ring)


def is_zero_dimensional(G: GroebnerBasis | Sequence[Poly]) -> bool:
    """True iff every variable has a pure power among the leading monomials."""
    gens = list(G)
    if not gens:
        return False
    if any(g.is_constant() and not g.is_zero() for g in gens):
        return True
    n = gens[0].ring.nvars
    covered = [False] * n
    for g in gens:
        lm = g.lm()
        nz = [i for i, e in enumerate(lm) if e]
        if len(nz) == 1:
            covered[nz[0]] = True
    return all(covered)


def quotient_basis(G: GroebnerBasis | Sequence[Poly]) -> QuotientBasis:
    """Standard monomials (not divisible by any leading monomial), ascending."""
    gens = list(G)
    if not gens:
        raise ValueError("zero ideal is not zero-dimensional")
    ring = gens[0].ring
    if any(g.is_constant() for g in gens):
        return QuotientBasis([], ring.names)
    if not is_zero_dimensional(gens):
        raise ValueError("quotient basis requested for a positive-dimensional ideal")
    lms = [g.lm() for g in gens]
    n = ring.nvars
    bound = [0] * n
    for lm in lms:
        nz = [i for i, e in enumerate(lm) if e]
        if len(nz) == 1:
            i = nz[0]
            bound[i] = lm[i] if bound[i] == 0 else min(bound[i], lm[i])
    found = []
    stack = [(0,) * n]
    seen = set(stack)
    while stack:
        m = stack.pop()
        if any(mono_divides(lm, m) for lm in lms):
            continue
        found.append(m)
        for i in range(n):
            if m[i] + 1 < bound[i]:
                nm = m[:i] + (m[i] + 1,) + m[i + 1:]
                if nm not in seen:
                    seen.add(nm)
                    stack.append(nm)
    found.sort()
    return QuotientBasis(found, ring.names)


def in_radical(f: Poly, E: Sequence[Poly]) -> bool:
    """Rabinowitsch test: ``f`` vanishes on V(E) iff 1 is in <E, 1 - t f>."""
    if f.is_zero():
        return True
    ring = f.ring
    ext = PolyRing(("_t",) + ring.names)
    t = ext.gen("_t")
    gens = [e.to_ring(ext) for e in E if not e.is_zero()]
    gens.append(ext.one() - t * f.to_ring(ext))
    return buchberger(gens).is_unit()
