"""Exact arithmetic in Q and in the quadratic field Q(sqrt 2).

Rationals are ``gmpy2.mpq`` values (always canonical: positive denominator,
reduced).  :class:`QS2` is an immutable pair ``a + b*sqrt(2)`` of rationals.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational as _AbstractRational

import gmpy2
from gmpy2 import mpq

Rational = type(mpq(0))

_RATIONAL_RE = r"-?(?:0|[1-9][0-9]*)(?:/[1-9][0-9]*)?"
_RATIONAL_PAT = re.compile(rf"^{_RATIONAL_RE}$")
_QS2_PAT = re.compile(
    rf"^({_RATIONAL_RE})(?:([+-])((?:0|[1-9][0-9]*)(?:/[1-9][0-9]*)?)\*r2)?$"
)


def to_rational(value) -> Rational:
    """Coerce ints, Fractions, mpq and exact decimal strings to ``mpq``."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, (int, Fraction, _AbstractRational)):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        return mpq(Fraction(value.strip()))
    raise TypeError(f"cannot convert {type(value).__name__} exactly to a rational")


def format_rational(q) -> str:
    q = to_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Rational:
    """Parse the canonical ``num/den`` form (den omitted when 1)."""
    if not _RATIONAL_PAT.match(text):
        raise ValueError(f"malformed rational {text!r}")
    q = mpq(text)
    if format_rational(q) != text:
        raise ValueError(f"rational {text!r} is not in lowest terms")
    return q


class QS2:
    """An element ``a + b*sqrt(2)`` of Q(sqrt 2), with ``a`` and ``b`` rational."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", to_rational(a))
        object.__setattr__(self, "b", to_rational(b))

    @classmethod
    def _raw(cls, a, b) -> "QS2":
        obj = object.__new__(cls)
        object.__setattr__(obj, "a", a)
        object.__setattr__(obj, "b", b)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("QS2 is immutable")

    def __reduce__(self):
        return (QS2, (Fraction(int(self.a.numerator), int(self.a.denominator)),
                      Fraction(int(self.b.numerator), int(self.b.denominator))))

    # -- coercion -----------------------------------------------------------

    @staticmethod
    def coerce(value) -> "QS2":
        if isinstance(value, QS2):
            return value
        return QS2._raw(to_rational(value), _ZERO_Q)

    # -- field operations ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, QS2):
            try:
                other = QS2.coerce(other)
            except TypeError:
                return NotImplemented
        return QS2._raw(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, QS2):
            try:
                other = QS2.coerce(other)
            except TypeError:
                return NotImplemented
        return QS2._raw(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return QS2.coerce(other) - self

    def __neg__(self):
        return QS2._raw(-self.a, -self.b)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, QS2):
            try:
                other = QS2.coerce(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.a, self.b, other.a, other.b
        if not b:
            if not d:
                return QS2._raw(a * c, _ZERO_Q)
            return QS2._raw(a * c, a * d)
        if not d:
            return QS2._raw(a * c, b * c)
        return QS2._raw(a * c + 2 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def norm(self) -> Rational:
        """Field norm ``a^2 - 2 b^2`` (zero only for zero)."""
        return self.a * self.a - 2 * self.b * self.b

    def conjugate(self) -> "QS2":
        return QS2._raw(self.a, -self.b)

    def inverse(self) -> "QS2":
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(sqrt 2)")
        if not self.b:
            return QS2._raw(1 / self.a, _ZERO_Q)
        n = self.norm()
        return QS2._raw(self.a / n, -self.b / n)

    def __truediv__(self, other):
        if not isinstance(other, QS2):
            try:
                other = QS2.coerce(other)
            except TypeError:
                return NotImplemented
        if not other.b:
            if not other.a:
                raise ZeroDivisionError("division by zero in Q(sqrt 2)")
            return QS2._raw(self.a / other.a, self.b / other.a)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return QS2.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, QS2):
            return self.a == other.a and self.b == other.b
        try:
            other = QS2.coerce(other)
        except TypeError:
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def is_rational(self) -> bool:
        return not self.b

    def sign(self) -> int:
        """Exact sign of ``a + b*sqrt(2)`` without floating point."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: |a| vs |b| sqrt 2 decided by a^2 vs 2 b^2
        diff = self.a * self.a - 2 * self.b * self.b
        if diff > 0:
            return sa
        if diff < 0:
            return sb
        return 0  # unreachable: sqrt 2 is irrational

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- conversion ---------------------------------------------------------

    def to_float(self) -> float:
        """Nearest binary64 to the exact value (computed at 200 bits)."""
        if not self.b:
            value = float(Fraction(int(self.a.numerator), int(self.a.denominator)))
        else:
            with gmpy2.context(precision=200):
                exact = gmpy2.mpfr(self.a) + gmpy2.mpfr(self.b) * gmpy2.sqrt(gmpy2.mpfr(2))
                value = float(exact)
        if value in (float("inf"), float("-inf")):
            raise OverflowError(f"{self} is outside binary64 range")
        return value

    __float__ = to_float

    def __str__(self):
        if not self.b:
            return format_rational(self.a)
        sign = "+" if self.b > 0 else "-"
        return f"{format_rational(self.a)}{sign}{format_rational(abs(self.b))}*r2"

    def __repr__(self):
        return f"QS2({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "QS2":
        """Inverse of ``str``: accepts ``a`` or ``a+b*r2`` / ``a-b*r2`` exactly."""
        m = _QS2_PAT.match(text)
        if not m:
            raise ValueError(f"malformed Q(sqrt 2) literal {text!r}")
        a = parse_rational(m.group(1))
        if m.group(2) is None:
            return cls._raw(a, _ZERO_Q)
        b = parse_rational(m.group(3))
        if not b:
            raise ValueError(f"zero sqrt2 part must be omitted in {text!r}")
        if m.group(2) == "-":
            b = -b
        return cls._raw(a, b)


_ZERO_Q = mpq(0)
ZERO = QS2._raw(mpq(0), mpq(0))
ONE = QS2._raw(mpq(1), mpq(0))
SQRT2 = QS2._raw(mpq(0), mpq(1))


def sign(v) -> int:
    return QS2.coerce(v).sign()


def to_float(v) -> float:
    return QS2.coerce(v).to_float()
