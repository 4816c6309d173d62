"""Sparse multivariate polynomials over Q(sqrt 2) in lex order.

A :class:`PolyRing` lists its variables in precedence order; the last
``nparams`` of them form the parameter tier (x, y, z for the manipulator), the
rest are decision variables.  Lex order over the full list, decision variables
first, is a block order in which every decision monomial dominates every
parameter monomial, so a polynomial read as an element of ``(K[A])[X]`` has its
leading decision monomial in the first slots of its ordinary lex leading
monomial.

Monomials are plain tuples of exponents: Python tuple comparison *is* the lex
order, which keeps the Groebner engine free of key functions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .exactnum import ONE, QS2, ZERO, format_rational, parse_rational

Monomial = Tuple[int, ...]


@dataclass(frozen=True)
class PolyRing:
    names: Tuple[str, ...]
    nparams: int = 0

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        if not 0 <= self.nparams <= len(self.names):
            raise ValueError("nparams out of range")

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def ndecision(self) -> int:
        return len(self.names) - self.nparams

    @property
    def decision_names(self) -> Tuple[str, ...]:
        return self.names[: self.ndecision]

    @property
    def param_names(self) -> Tuple[str, ...]:
        return self.names[self.ndecision:]

    def decision_ring(self) -> "PolyRing":
        return PolyRing(self.decision_names)

    def param_ring(self) -> "PolyRing":
        return PolyRing(self.param_names)

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(ONE)

    def const(self, c) -> "Poly":
        c = QS2.coerce(c)
        return Poly(self, {(0,) * self.nvars: c} if c else {})

    def gen(self, name: str) -> "Poly":
        i = self.names.index(name)
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): ONE})

    def gens(self) -> Tuple["Poly", ...]:
        return tuple(self.gen(n) for n in self.names)

    def monomial(self, exps: Monomial, coeff=ONE) -> "Poly":
        coeff = QS2.coerce(coeff)
        return Poly(self, {tuple(exps): coeff} if coeff else {})

    def parse(self, text: str) -> "Poly":
        return parse_poly(text, self)

    def __str__(self):
        if self.nparams:
            return f"Q(r2)[{','.join(self.param_names)}][{','.join(self.decision_names)}]"
        return f"Q(r2)[{','.join(self.names)}]"


def lex_cmp(m1: Monomial, m2: Monomial) -> int:
    """-1, 0 or 1 as ``m1`` is below, equal to, or above ``m2`` in lex order."""
    if len(m1) != len(m2):
        raise ValueError("monomials from different rings")
    return (m1 > m2) - (m1 < m2)


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    return tuple(a + b for a, b in zip(m1, m2))


def mono_divides(m1: Monomial, m2: Monomial) -> bool:
    for a, b in zip(m1, m2):
        if a > b:
            return False
    return True


def mono_div(m2: Monomial, m1: Monomial) -> Monomial:
    return tuple(b - a for a, b in zip(m1, m2))


def mono_lcm(m1: Monomial, m2: Monomial) -> Monomial:
    return tuple(a if a > b else b for a, b in zip(m1, m2))


def format_monomial(m: Monomial, names: Sequence[str]) -> str:
    parts = []
    for e, n in zip(m, names):
        if e == 1:
            parts.append(n)
        elif e > 1:
            parts.append(f"{n}^{e}")
    return "*".join(parts) if parts else "1"


class Poly:
    """Immutable-by-convention sparse polynomial: ``terms`` maps monomials to
    nonzero :class:`QS2` coefficients."""

    __slots__ = ("ring", "terms", "_lm")

    def __init__(self, ring: PolyRing, terms: Dict[Monomial, QS2]):
        self.ring = ring
        self.terms = terms
        self._lm = None

    @classmethod
    def from_terms(cls, ring: PolyRing, terms: Mapping[Monomial, object]) -> "Poly":
        """Checked constructor: coerces coefficients and drops zeros."""
        out = {}
        for m, c in terms.items():
            m = tuple(m)
            if len(m) != ring.nvars or any(e < 0 for e in m):
                raise ValueError(f"bad exponent vector {m} for {ring}")
            c = QS2.coerce(c)
            if c:
                out[m] = out[m] + c if m in out else c
        return cls(ring, {m: c for m, c in out.items() if c})

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_constant(self) -> bool:
        if not self.terms:
            return True
        return len(self.terms) == 1 and not any(next(iter(self.terms)))

    def constant_value(self) -> QS2:
        return self.terms.get((0,) * self.ring.nvars, ZERO)

    def lm(self) -> Monomial:
        if self._lm is None:
            if not self.terms:
                raise ValueError("zero polynomial has no leading monomial")
            self._lm = max(self.terms)
        return self._lm

    def lc(self) -> QS2:
        return self.terms[self.lm()]

    def degree(self, var: int | None = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(m) for m in self.terms)
        return max(m[var] for m in self.terms)

    def support(self) -> Tuple[int, ...]:
        """Indices of variables occurring in the polynomial."""
        used = [False] * self.ring.nvars
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used[i] = True
        return tuple(i for i, u in enumerate(used) if u)

    def sorted_terms(self):
        return sorted(self.terms.items(), reverse=True)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "Poly"):
        if self.ring != other.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return self.ring.const(other)

    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in other.terms.items():
            v = terms.get(m)
            if v is None:
                terms[m] = c
            else:
                v = v + c
                if v:
                    terms[m] = v
                else:
                    del terms[m]
        return Poly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c) -> "Poly":
        c = QS2.coerce(c)
        if not c:
            return self.ring.zero()
        if c == ONE:
            return self
        return Poly(self.ring, {m: v * c for m, v in self.terms.items()})

    def mul_term(self, mono: Monomial, c: QS2) -> "Poly":
        return Poly(self.ring, {mono_mul(m, mono): v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        if len(self.terms) > len(other.terms):
            self, other = other, self
        terms: Dict[Monomial, QS2] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = terms.get(m)
                terms[m] = c1 * c2 if v is None else v + c1 * c2
        return Poly(self.ring, {m: c for m, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        return self.scale(self.lc().inverse())

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        try:
            other = self.ring.const(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, point: Sequence) -> QS2:
        """Exact value at a full point (one entry per ring variable)."""
        vals = [QS2.coerce(v) for v in point]
        if len(vals) != self.ring.nvars:
            raise ValueError("point dimension does not match ring")
        return _eval_terms(self.terms, vals)

    def evaluate_float(self, point: Sequence[float]) -> float:
        total = 0.0
        for m, c in self.terms.items():
            t = c.to_float()
            for v, e in zip(point, m):
                if e:
                    t *= v ** e
            total += t
        return total

    def substitute(self, values: Mapping[int, object], target: PolyRing | None = None) -> "Poly":
        """Substitute exact values for the variables at the given indices.

        With ``target`` the remaining variables are mapped, by name, into that
        ring (which must contain all of them).
        """
        vals = {i: QS2.coerce(v) for i, v in values.items()}
        keep = [i for i in range(self.ring.nvars) if i not in vals]
        if target is None:
            target = self.ring
            place = list(range(self.ring.nvars))
        else:
            place = [target.names.index(self.ring.names[i]) if i in keep else -1
                     for i in range(self.ring.nvars)]
        power_cache: Dict[Tuple[int, int], QS2] = {}
        terms: Dict[Monomial, QS2] = {}
        n = target.nvars
        for m, c in self.terms.items():
            coeff = c
            e = [0] * n
            for i, k in enumerate(m):
                if not k:
                    continue
                if i in vals:
                    key = (i, k)
                    pw = power_cache.get(key)
                    if pw is None:
                        pw = vals[i] ** k
                        power_cache[key] = pw
                    coeff = coeff * pw
                    if not coeff:
                        break
                else:
                    e[place[i]] += k
            if not coeff:
                continue
            key = tuple(e)
            v = terms.get(key)
            terms[key] = coeff if v is None else v + coeff
        return Poly(target, {m: c for m, c in terms.items() if c})

    def to_ring(self, target: PolyRing) -> "Poly":
        """Re-embed into a ring containing all used variables (by name)."""
        place = []
        for i, name in enumerate(self.ring.names):
            if name in target.names:
                place.append(target.names.index(name))
            else:
                place.append(-1)
        terms = {}
        for m, c in self.terms.items():
            e = [0] * target.nvars
            for i, k in enumerate(m):
                if k:
                    if place[i] < 0:
                        raise ValueError(f"variable {self.ring.names[i]} not in {target}")
                    e[place[i]] += k
            terms[tuple(e)] = c
        return Poly(target, terms)

    # -- rendering ----------------------------------------------------------

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


def _eval_terms(terms: Dict[Monomial, QS2], vals: Sequence[QS2]) -> QS2:
    n = len(vals)
    maxdeg = [0] * n
    for m in terms:
        for i, e in enumerate(m):
            if e > maxdeg[i]:
                maxdeg[i] = e
    powers = []
    for i in range(n):
        row = [ONE]
        for _ in range(maxdeg[i]):
            row.append(row[-1] * vals[i])
        powers.append(row)
    total = ZERO
    for m, c in terms.items():
        t = c
        for i, e in enumerate(m):
            if e:
                t = t * powers[i][e]
        total = total + t
    return total


# ---------------------------------------------------------------------------
# Parametric view: K[A][X]


def split_by_decision(p: Poly) -> Dict[Monomial, Poly]:
    """Group ``p`` as a polynomial in the decision variables whose
    coefficients live in the parameter ring."""
    nx = p.ring.ndecision
    pring = p.ring.param_ring()
    groups: Dict[Monomial, Dict[Monomial, QS2]] = {}
    for m, c in p.terms.items():
        groups.setdefault(m[:nx], {})[m[nx:]] = c
    return {xm: Poly(pring, t) for xm, t in groups.items()}


def leading_data(p: Poly) -> Tuple[Monomial, Poly, Poly]:
    """(LM, LC, LT) of ``p`` read in ``(K[A])[X]``.

    LM is a decision monomial, LC a parameter polynomial and LT = LC*LM as an
    element of the full ring.
    """
    if p.is_zero():
        raise ValueError("zero polynomial has no leading data")
    nx = p.ring.ndecision
    lmx = p.lm()[:nx]
    lt_terms = {m: c for m, c in p.terms.items() if m[:nx] == lmx}
    lc = Poly(p.ring.param_ring(), {m[nx:]: c for m, c in lt_terms.items()})
    return lmx, lc, Poly(p.ring, lt_terms)


def specialize(p: Poly, point: Sequence) -> Poly:
    """Substitute exact parameter values, landing in the decision ring."""
    nx = p.ring.ndecision
    if len(point) != p.ring.nparams:
        raise ValueError(f"expected {p.ring.nparams} parameter values, got {len(point)}")
    values = {nx + i: v for i, v in enumerate(point)}
    return p.substitute(values, p.ring.decision_ring())


def embed_param(q: Poly, ring: PolyRing) -> Poly:
    """Lift a parameter-ring polynomial into the full ring."""
    nx = ring.ndecision
    pad = (0,) * nx
    return Poly(ring, {pad + m: c for m, c in q.terms.items()})


# ---------------------------------------------------------------------------
# Rational functions in the parameters


class RatFunc:
    """``num / prod(f**e for f, e in den)`` with polynomial ``num`` and a
    factored denominator of monic polynomials."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Iterable[Tuple[Poly, int]] = ()):
        factors = []
        for f, e in den:
            if e <= 0:
                continue
            if f.is_zero():
                raise ZeroDivisionError("zero denominator factor")
            lc = f.lc()
            if f.is_constant():
                num = num.scale(lc.inverse() ** e)
                continue
            if lc != ONE:
                num = num.scale(lc.inverse() ** e)
                f = f.monic()
            factors.append((f, e))
        merged: Dict[Poly, int] = {}
        for f, e in factors:
            merged[f] = merged.get(f, 0) + e
        self.num = num
        self.den = tuple(sorted(merged.items(), key=lambda fe: format_poly(fe[0])))

    def is_polynomial(self) -> bool:
        return not self.den

    def evaluate(self, point: Sequence) -> QS2:
        d = ONE
        for f, e in self.den:
            fv = f.evaluate(point)
            if not fv:
                raise ZeroDivisionError(f"denominator factor {f} vanishes at {point}")
            d = d * fv ** e
        return self.num.evaluate(point) / d

    def __eq__(self, other):
        return isinstance(other, RatFunc) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        return format_ratfunc(self)

    def __repr__(self):
        return f"RatFunc({format_ratfunc(self)!r})"


# ---------------------------------------------------------------------------
# Text codec


def format_coeff(c: QS2) -> str:
    if c.is_rational():
        return format_rational(c.a)
    return f"({c})"


def format_poly(p: Poly) -> str:
    """Terms in decreasing lex order as ``coef*mono`` joined by `` + ``."""
    if p.is_zero():
        return "0"
    names = p.ring.names
    parts = []
    for m, c in p.sorted_terms():
        cs = format_coeff(c)
        if any(m):
            parts.append(f"{cs}*{format_monomial(m, names)}")
        else:
            parts.append(cs)
    return " + ".join(parts)


def format_ratfunc(r: RatFunc) -> str:
    if not r.den:
        return format_poly(r.num)
    den = " * ".join(f"[{format_poly(f)}]^{e}" for f, e in r.den)
    return f"[{format_poly(r.num)}] / {den}"


_VAR_RE = re.compile(r"^([A-Za-z][A-Za-z0-9_]*)(?:\^([1-9][0-9]*))?$")


def parse_monomial(text: str, ring: PolyRing) -> Monomial:
    e = [0] * ring.nvars
    if text == "1":
        return tuple(e)
    for factor in text.split("*"):
        m = _VAR_RE.match(factor)
        if not m or m.group(1) not in ring.names:
            raise ValueError(f"bad monomial factor {factor!r}")
        e[ring.names.index(m.group(1))] += int(m.group(2) or 1)
    return tuple(e)


def parse_poly(text: str, ring: PolyRing) -> Poly:
    """Inverse of :func:`format_poly`."""
    text = text.strip()
    if text == "0":
        return ring.zero()
    terms: Dict[Monomial, QS2] = {}
    for chunk in text.split(" + "):
        if chunk.startswith("("):
            close = chunk.find(")")
            if close < 0:
                raise ValueError(f"unbalanced coefficient in {chunk!r}")
            coeff = QS2.parse(chunk[1:close])
            if coeff.is_rational():
                raise ValueError(f"rational coefficient must not be parenthesized: {chunk!r}")
            rest = chunk[close + 1:]
        else:
            star = chunk.find("*")
            head = chunk if star < 0 else chunk[:star]
            coeff = QS2(parse_rational(head))
            rest = "" if star < 0 else chunk[star:]
        if rest:
            if not rest.startswith("*"):
                raise ValueError(f"malformed term {chunk!r}")
            mono = parse_monomial(rest[1:], ring)
            if not any(mono):
                raise ValueError(f"constant term written with monomial: {chunk!r}")
        else:
            mono = (0,) * ring.nvars
        if not coeff:
            raise ValueError(f"zero coefficient in {chunk!r}")
        if mono in terms:
            raise ValueError(f"repeated monomial in {text!r}")
        terms[mono] = coeff
    p = Poly(ring, terms)
    if format_poly(p) != text:
        raise ValueError(f"polynomial text is not canonical: {text!r}")
    return p


def parse_ratfunc(text: str, ring: PolyRing) -> RatFunc:
    text = text.strip()
    if not text.startswith("["):
        return RatFunc(parse_poly(text, ring))
    close = text.index("]")
    num = parse_poly(text[1:close], ring)
    rest = text[close + 1:]
    if not rest.startswith(" / "):
        raise ValueError(f"malformed rational function {text!r}")
    den = []
    for factor in rest[3:].split(" * "):
        m = re.match(r"^\[(.*)\]\^([1-9][0-9]*)$", factor)
        if not m:
            raise ValueError(f"malformed denominator factor {factor!r}")
        den.append((parse_poly(m.group(1), ring), int(m.group(2))))
    r = RatFunc(num, den)
    if format_ratfunc(r) != text:
        raise ValueError(f"rational function text is not canonical: {text!r}")
    return r
