"""Real root counting with the Hermite quadratic form, and univariate helpers.

For a zero-dimensional ideal I with quotient basis v_1..v_d, the Hermite
matrix has entries Tr(f -> v_i v_j f) on K[X]/I.  Its signature is the number
of distinct real points of V(I); since the matrix is symmetric its
characteristic polynomial is real-rooted and Descartes' rule applied to
chi(X) and chi(-X) counts positive and negative eigenvalues exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import instrument
from .exactnum import ONE, QS2, ZERO
from .groebner import GroebnerBasis, QuotientBasis, normal_form, quotient_basis
from .polyring import Monomial, Poly, PolyRing, RatFunc, leading_data, mono_divides, mono_mul, split_by_decision

DEFAULT_TOL = 1e-8


class BudgetExceeded(RuntimeError):
    """Raised when a parametric computation grows past its term budget."""


@dataclass
class HermiteMatrix:
    entries: list  # d x d, QS2 or RatFunc
    basis: QuotientBasis

    @property
    def d(self) -> int:
        return len(self.entries)

    def is_symmetric(self) -> bool:
        n = self.d
        return all(self.entries[i][j] == self.entries[j][i] for i in range(n) for j in range(i))


@dataclass
class CharPoly:
    """Monic characteristic polynomial; ``coeffs[k]`` is a_k, the coefficient
    of X^k, for k < d."""

    coeffs: list  # QS2 or RatFunc

    @property
    def d(self) -> int:
        return len(self.coeffs)

    def evaluate(self, point: Sequence) -> "CharPoly":
        return CharPoly([c.evaluate(point) if isinstance(c, RatFunc) else c for c in self.coeffs])

    def __str__(self):
        terms = [f"X^{self.d}"] + [f"({c})*X^{k}" for k, c in reversed(list(enumerate(self.coeffs)))]
        return " + ".join(terms)


@dataclass
class SignCount:
    s_plus: int
    s_minus: int

    @property
    def count(self) -> int:
        return self.s_plus - self.s_minus


# ---------------------------------------------------------------------------
# Hermite matrix, specialized (coefficients in Q(sqrt 2))


def _basis_index(qb: QuotientBasis) -> Dict[Monomial, int]:
    return {m: i for i, m in enumerate(qb.monomials)}


def hermite_matrix(G: GroebnerBasis | Sequence[Poly], qb: QuotientBasis | None = None) -> HermiteMatrix:
    """Hermite matrix of a zero-dimensional ideal given by a Groebner basis."""
    gens = list(G)
    if qb is None:
        qb = quotient_basis(gens)  # raises on positive dimension
    ring = gens[0].ring
    d = qb.d
    idx = _basis_index(qb)
    cache: Dict[Monomial, Poly] = {}

    def nf(m: Monomial) -> Poly:
        r = cache.get(m)
        if r is None:
            r = normal_form(ring.monomial(m), gens)
            cache[m] = r
        return r

    # trace of multiplication by each monomial v_m of the products v_i v_j
    def trace(m: Monomial) -> QS2:
        t = ZERO
        for k, vk in enumerate(qb.monomials):
            r = nf(mono_mul(m, vk))
            t = t + r.terms.get(vk, ZERO)
        return t

    traces: Dict[Monomial, QS2] = {}
    M = [[ZERO] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            prod = nf(mono_mul(qb.monomials[i], qb.monomials[j]))
            e = ZERO
            for m, c in prod.terms.items():
                if m not in idx:
                    raise ValueError("normal form left the quotient basis; input is not a Groebner basis")
                if m not in traces:
                    traces[m] = trace(m)
                e = e + c * traces[m]
            M[i][j] = M[j][i] = e
    return HermiteMatrix(M, qb)


# ---------------------------------------------------------------------------
# Hermite matrix, parametric (coefficients rational in the parameters)


class _Frac:
    """num / prod(lcs[i] ** exps[i]) over a fixed list of denominators."""

    __slots__ = ("num", "exps")

    def __init__(self, num: Dict[Monomial, Poly], exps: Tuple[int, ...]):
        self.num = num
        self.exps = exps


def _pseudo_nf(xm: Monomial, basis, nlc: int, pring: PolyRing) -> _Frac:
    """Normal form of the decision monomial ``xm`` in K(A)[X]; every division
    by a leading coefficient is recorded in the exponent vector."""
    p: Dict[Monomial, Poly] = {xm: pring.one()}
    exps = [0] * nlc
    done: Dict[Monomial, Poly] = {}
    while p:
        m = max(p)
        c = p.pop(m)
        for lm, k, lc, split in basis:
            if mono_divides(lm, m):
                shift = tuple(b - a for a, b in zip(lm, m))
                # p <- lc*p - c * shift * g ; the remainder so far is scaled too
                for key in list(p):
                    p[key] = p[key] * lc
                for key in list(done):
                    done[key] = done[key] * lc
                for gm, gc in split.items():
                    if gm == lm:
                        continue
                    mm = tuple(a + b for a, b in zip(gm, shift))
                    v = p.get(mm)
                    t = c * gc
                    v = -t if v is None else v - t
                    if v.is_zero():
                        p.pop(mm, None)
                    else:
                        p[mm] = v
                exps[k] += 1
                break
        else:
            done[m] = c
    return _Frac(done, tuple(exps))


def _frac_add(a: Poly, ea, b: Poly, eb, lcs) -> Tuple[Poly, Tuple[int, ...]]:
    e = tuple(max(x, y) for x, y in zip(ea, eb))
    for (k, x), y in zip(enumerate(ea), e):
        if y > x:
            a = a * lcs[k] ** (y - x)
    for (k, x), y in zip(enumerate(eb), e):
        if y > x:
            b = b * lcs[k] ** (y - x)
    return a + b, e


def parametric_hermite(basis: Sequence[Poly], qb: QuotientBasis | None = None):
    """Hermite matrix of a parametric basis over K(A).

    Returns ``(N, lcs, exps, qb)``: a symmetric matrix of parameter
    polynomials and the common denominator prod(lcs[i] ** exps[i]), so the
    Hermite matrix is N / D.  The denominators are products of leading
    coefficients, which are nonzero on the branch segment.
    """
    basis = list(basis)
    ring = basis[0].ring
    pring = ring.param_ring()
    data = []
    lcs: List[Poly] = []
    for g in basis:
        lm, lc, _ = leading_data(g)
        if lc.is_constant():
            k = -1
        else:
            if lc not in lcs:
                lcs.append(lc)
            k = lcs.index(lc)
        data.append((lm, k, lc, split_by_decision(g)))
    # constant leading coefficients: make monic so no denominator is needed
    norm = []
    for lm, k, lc, split in data:
        if k < 0:
            inv = lc.constant_value().inverse()
            split = {m: c.scale(inv) for m, c in split.items()}
            lc = pring.one()
            k = len(lcs)
        norm.append((lm, k, lc, split))
    nlc = len(lcs) + 1
    lcs_all = lcs + [pring.one()]

    if qb is None:
        dring = ring.decision_ring()
        qb = quotient_basis([dring.monomial(lm) for lm, *_ in norm])
    d = qb.d
    idx = _basis_index(qb)
    cache: Dict[Monomial, _Frac] = {}

    def nf(m):
        r = cache.get(m)
        if r is None:
            r = _pseudo_nf(m, norm, nlc, pring)
            cache[m] = r
        return r

    zero_e = (0,) * nlc
    entries = [[None] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            acc, e = pring.zero(), zero_e
            vij = mono_mul(qb.monomials[i], qb.monomials[j])
            for vk in qb.monomials:
                r = nf(mono_mul(vij, vk))
                c = r.num.get(vk)
                if c is None:
                    continue
                acc, e = _frac_add(acc, e, c, r.exps, lcs_all)
            entries[i][j] = entries[j][i] = (acc, e)
    # common denominator
    top = tuple(max(entries[i][j][1][k] for i in range(d) for j in range(d)) for k in range(nlc))
    N = [[None] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            num, e = entries[i][j]
            for k in range(nlc):
                if top[k] > e[k]:
                    num = num * lcs_all[k] ** (top[k] - e[k])
            N[i][j] = N[j][i] = num
    return N, lcs, top[: len(lcs)], qb


# ---------------------------------------------------------------------------
# characteristic polynomial


def _div_int(v, k: int):
    if isinstance(v, Poly):
        return v.scale(QS2(Fraction(1, k)))
    return v / k


def _sym_mul(A, B, zero, budget=None):
    """A*B for commuting symmetric matrices (the product is symmetric)."""
    n = len(A)
    C = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            acc = zero
            for k in range(n):
                acc = acc + A[i][k] * B[k][j]
            if budget is not None and isinstance(acc, Poly) and len(acc) > budget:
                raise BudgetExceeded(f"intermediate entry has {len(acc)} terms")
            C[i][j] = C[j][i] = acc
    return C


def faddeev_leverrier(A, zero, one, budget: int | None = None) -> list:
    """Coefficients a_0..a_{d-1} of det(X I - A) for a symmetric matrix.

    Over polynomial entries only ring operations and division by small
    integers are needed.
    """
    n = len(A)
    coeffs = [None] * n
    M = [[one if i == j else zero for j in range(n)] for i in range(n)]  # M_1 = I
    for k in range(1, n + 1):
        AM = _sym_mul(A, M, zero, budget) if k > 1 else [row[:] for row in A]
        tr = zero
        for i in range(n):
            tr = tr + AM[i][i]
        c = -_div_int(tr, k)
        coeffs[n - k] = c
        if k < n:
            M = [[AM[i][j] + c if i == j else AM[i][j] for j in range(n)] for i in range(n)]
    return coeffs


def char_poly(M: HermiteMatrix | Sequence[Sequence[QS2]]) -> CharPoly:
    entries = M.entries if isinstance(M, HermiteMatrix) else [[QS2.coerce(v) for v in row] for row in M]
    n = len(entries)
    if any(len(row) != n for row in entries):
        raise ValueError("char_poly needs a square matrix")
    if n == 0:
        return CharPoly([])
    return CharPoly(faddeev_leverrier(entries, ZERO, ONE))


def parametric_char_poly(N, lcs: Sequence[Poly], exps: Sequence[int], budget: int | None = None) -> CharPoly:
    """Characteristic polynomial of N / prod(lcs**exps) with RatFunc coefficients.

    a_k(N/D) = a_k(N) / D^(d-k).
    """
    d = len(N)
    if d == 0:
        return CharPoly([])
    pring = N[0][0].ring
    raw = faddeev_leverrier(N, pring.zero(), pring.one(), budget)
    out = []
    for k, c in enumerate(raw):
        den = [(f, e * (d - k)) for f, e in zip(lcs, exps) if e]
        out.append(RatFunc(c, den))
    return CharPoly(out)


# ---------------------------------------------------------------------------
# sign counting


def _changes(seq: Sequence[QS2]) -> int:
    signs = [s for s in (v.sign() for v in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sign_sequences(chi: CharPoly) -> Tuple[List[QS2], List[QS2]]:
    """L+ = (1, a_{d-1}, ..., a_0) and L- = ((-1)^d, b_{d-1}, ..., b_0)."""
    d = chi.d
    a = [QS2.coerce(c) for c in chi.coeffs]
    plus = [ONE] + [a[k] for k in range(d - 1, -1, -1)]
    minus = [ONE if d % 2 == 0 else -ONE] + [a[k] if k % 2 == 0 else -a[k] for k in range(d - 1, -1, -1)]
    return plus, minus


def count_signs(chi: CharPoly) -> SignCount:
    plus, minus = sign_sequences(chi)
    return SignCount(_changes(plus), _changes(minus))


def count_real_roots(chi: CharPoly) -> int:
    """Signature of the Hermite form, S+ - S-."""
    return count_signs(chi).count


# ---------------------------------------------------------------------------
# exact univariate Sturm counting (coefficient lists, highest degree first)


def _trim(p: List[QS2]) -> List[QS2]:
    i = 0
    while i < len(p) and not p[i]:
        i += 1
    return p[i:]


def _prem(a: List[QS2], b: List[QS2]) -> List[QS2]:
    a = list(a)
    inv = b[0].inverse()
    while len(a) >= len(b) and a:
        q = a[0] * inv
        for i in range(len(b)):
            a[i] = a[i] - q * b[i]
        a = _trim(a[1:] if not a[0] else a)
    return a


def _derivative(p: List[QS2]) -> List[QS2]:
    n = len(p) - 1
    return _trim([c * (n - i) for i, c in enumerate(p[:-1])])


def _horner(p: List[QS2], x: QS2) -> QS2:
    acc = ZERO
    for c in p:
        acc = acc * x + c
    return acc


def sturm_sequence(p: Sequence) -> List[List[QS2]]:
    p = _trim([QS2.coerce(c) for c in p])
    if not p:
        raise ValueError("Sturm sequence of the zero polynomial")
    seq = [p, _derivative(p)]
    while seq[-1]:
        r = _prem(seq[-2], seq[-1])
        seq.append([-c for c in r])
    return [s for s in seq if s]


def sturm_count(p: Sequence, a=None, b=None) -> int:
    """Distinct real roots of ``p`` (coefficients highest first) in (a, b];
    ``None`` bounds mean infinity."""
    seq = sturm_sequence(p)

    def at_inf(sign_x: int) -> int:
        vals = []
        for s in seq:
            deg = len(s) - 1
            sg = s[0].sign()
            if sign_x < 0 and deg % 2:
                sg = -sg
            vals.append(QS2(sg))
        return _changes(vals)

    va = at_inf(-1) if a is None else _changes([_horner(s, QS2.coerce(a)) for s in seq])
    vb = at_inf(1) if b is None else _changes([_horner(s, QS2.coerce(b)) for s in seq])
    return va - vb


# ---------------------------------------------------------------------------
# numeric univariate roots


def _polish(coeffs: np.ndarray, r: complex, iters: int = 60) -> complex:
    dcoeffs = np.polyder(coeffs)
    for _ in range(iters):
        f = np.polyval(coeffs, r)
        df = np.polyval(dcoeffs, r)
        if df == 0:
            break
        step = f / df
        r = r - step
        if abs(step) <= 1e-16 * max(1.0, abs(r)):
            break
    return r


def univar_real_roots(coeffs: Sequence[float], tol: float = DEFAULT_TOL) -> List[float]:
    """Real roots of a float polynomial (coefficients highest first).

    Companion-matrix eigenvalues are Newton-polished in complex arithmetic, so
    clusters around multiple real roots settle onto the real axis; roots with
    |Im| <= tol*max(1,|r|) are kept and deduplicated within the same tolerance.
    """
    instrument.bump(instrument.UNIVARIATE_SOLVE)
    c = np.asarray(coeffs, dtype=float)
    nz = np.flatnonzero(np.abs(c) > 0)
    if nz.size == 0:
        raise ValueError("zero polynomial")
    c = c[nz[0]:]
    if c.size < 2:
        raise ValueError("constant polynomial has no roots")
    if abs(c[0]) <= tol * np.max(np.abs(c)):
        raise ValueError("leading coefficient is numerically zero")
    roots = np.roots(c)
    out: List[float] = []
    for r in roots:
        r = _polish(c, complex(r))
        if abs(r.imag) > tol * max(1.0, abs(r)):
            continue
        x = _polish(c, r.real).real
        if not any(abs(x - y) <= tol * max(1.0, abs(x)) for y in out):
            out.append(x)
    out.sort()
    return out
