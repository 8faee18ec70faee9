"""Exact scalars: rationals and elements of real quadratic fields Q(sqrt d).

Rationals are plain :class:`fractions.Fraction` values.  Irrational elements
are :class:`QuadraticNumber` instances ``a + b*sqrt(d)`` with ``b != 0``; any
operation whose result has a vanishing irrational part hands back a
``Fraction``, so the two variants never overlap.
"""

from __future__ import annotations

import math
import operator
import re
from fractions import Fraction
from typing import Union

from .errors import DivisionByZero, IncompatibleExtension, NotASquare, ParseError

Scalar = Union[Fraction, "QuadraticNumber"]


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Return ``(s, d)`` with ``n == s*s*d`` and ``d`` squarefree (``n > 0``)."""
    if n <= 0:
        raise ValueError("squarefree_decompose needs a positive integer")
    s, d = 1, 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            d *= p
        p += 1 if p == 2 else 2
    return s, d * n


def _is_squarefree(d: int) -> bool:
    return d > 1 and squarefree_decompose(d)[0] == 1


class QuadraticNumber:
    """``a + b*sqrt(d)`` with rational ``a, b``, ``b != 0`` and squarefree ``d > 1``."""

    __slots__ = ("a", "b", "d")

    def __new__(cls, a, b, d: int):
        a, b = Fraction(a), Fraction(b)
        if not isinstance(d, int) or not _is_squarefree(d):
            raise ValueError(f"extension parameter must be a squarefree integer > 1, got {d!r}")
        if b == 0:
            return a
        self = object.__new__(cls)
        self.a, self.b, self.d = a, b, d
        return self

    @classmethod
    def _make(cls, a: Fraction, b: Fraction, d: int):
        # trusted constructor: d already validated
        if b == 0:
            return a
        self = object.__new__(cls)
        self.a, self.b, self.d = a, b, d
        return self

    def _split(self, other):
        if isinstance(other, QuadraticNumber):
            if other.d != self.d:
                raise IncompatibleExtension(
                    f"cannot combine elements of Q(sqrt {self.d}) and Q(sqrt {other.d})")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        s = self._split(other)
        if s is None:
            return NotImplemented
        return QuadraticNumber._make(self.a + s[0], self.b + s[1], self.d)

    __radd__ = __add__

    def __sub__(self, other):
        s = self._split(other)
        if s is None:
            return NotImplemented
        return QuadraticNumber._make(self.a - s[0], self.b - s[1], self.d)

    def __rsub__(self, other):
        s = self._split(other)
        if s is None:
            return NotImplemented
        return QuadraticNumber._make(s[0] - self.a, s[1] - self.b, self.d)

    def __mul__(self, other):
        s = self._split(other)
        if s is None:
            return NotImplemented
        c, e = s
        return QuadraticNumber._make(self.a * c + self.b * e * self.d,
                                     self.a * e + self.b * c, self.d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def conjugate(self):
        return QuadraticNumber._make(self.a, -self.b, self.d)

    def inverse(self):
        n = self.norm()  # nonzero: d is not a rational square
        return QuadraticNumber._make(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, QuadraticNumber):
            self._split(other)
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by zero")
            return QuadraticNumber._make(self.a / other, self.b / other, self.d)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = Fraction(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __neg__(self):
        return QuadraticNumber._make(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if sign(self) < 0 else self

    def __bool__(self):
        return True

    def __eq__(self, other):
        if isinstance(other, QuadraticNumber):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def _cmp(self, other, op):
        diff = self.__sub__(other)
        if diff is NotImplemented:
            return NotImplemented
        return op(sign(diff), 0)

    def __lt__(self, other):
        return self._cmp(other, operator.lt)

    def __le__(self, other):
        return self._cmp(other, operator.le)

    def __gt__(self, other):
        return self._cmp(other, operator.gt)

    def __ge__(self, other):
        return self._cmp(other, operator.ge)

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"QuadraticNumber({format_scalar(self)})"

    def __str__(self):
        return format_scalar(self)


def to_scalar(x) -> Scalar:
    if isinstance(x, (Fraction, QuadraticNumber)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def sign(x) -> int:
    """Exact sign of a rational or quadratic scalar."""
    if not isinstance(x, QuadraticNumber):
        return (x > 0) - (x < 0)
    sa = (x.a > 0) - (x.a < 0)
    sb = (x.b > 0) - (x.b < 0)
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: the larger of a^2 and b^2 d wins (they cannot be equal)
    return sa if x.a * x.a > x.b * x.b * x.d else sb


_OPS = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
}


def arith(op: str, x, y=None) -> Scalar:
    """Apply ``add``, ``sub``, ``mul``, ``div`` or ``neg`` to exact scalars."""
    x = to_scalar(x)
    if op == "neg":
        return -x
    if op not in _OPS:
        raise ValueError(f"unknown operation {op!r}")
    y = to_scalar(y)
    if op == "div" and y == 0:
        raise DivisionByZero("division by zero")
    return _OPS[op](x, y)


def extension_of(values) -> int:
    """The common ``d`` of a collection of scalars (1 when all are rational)."""
    d = 1
    for v in values:
        if isinstance(v, QuadraticNumber):
            if d not in (1, v.d):
                raise IncompatibleExtension(f"mixed extensions sqrt {d} and sqrt {v.d}")
            d = v.d
    return d


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, m = q.numerator, q.denominator
    rn, rm = math.isqrt(n), math.isqrt(m)
    if rn * rn == n and rm * rm == m:
        return Fraction(rn, rm)
    return None


def sqrt_exact(x, d_hint: int | None = None) -> Scalar:
    """Nonnegative square root of ``x`` inside Q or a real quadratic field.

    Raises :class:`NotASquare` when the root is negative-radicand or would need
    a field of degree > 2 (or an extension other than ``d_hint``).
    """
    x = to_scalar(x)
    if sign(x) < 0:
        raise NotASquare(f"{format_scalar(x)} is negative")
    if isinstance(x, Fraction):
        r = _rational_sqrt(x)
        if r is not None:
            return r
        # sqrt(n/m) = sqrt(n*m)/m = s*sqrt(d)/m
        s, d = squarefree_decompose(x.numerator * x.denominator)
        if d_hint not in (None, 1, d):
            raise NotASquare(f"sqrt({format_scalar(x)}) lies outside Q(sqrt {d_hint})")
        return QuadraticNumber(0, Fraction(s, x.denominator), d)
    # (u + v sqrt d)^2 = a + b sqrt d  <=>  u^2 + d v^2 = a,  2uv = b
    disc = _rational_sqrt(x.norm())
    if disc is not None:
        for u2 in ((x.a + disc) / 2, (x.a - disc) / 2):
            u = _rational_sqrt(u2)
            if u:
                root = QuadraticNumber._make(u, x.b / (2 * u), x.d)
                return -root if sign(root) < 0 else root
    raise NotASquare(f"{format_scalar(x)} is not a square in Q(sqrt {x.d})")


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x) -> str:
    """Canonical text: ``p``, ``p/q`` or ``p/q+r/s*sqrt(d)``."""
    x = to_scalar(x)
    if isinstance(x, QuadraticNumber):
        return f"{_fmt_rational(x.a)}+{_fmt_rational(x.b)}*sqrt({x.d})"
    return _fmt_rational(x)


_RAT = r"[+-]?\d+(?:/\d+)?"
_RATIONAL_RE = re.compile(rf"^{_RAT}$")
_QUADRATIC_RE = re.compile(
    rf"^(?:(?P<a>{_RAT})(?P<op>[+-]))?(?P<b>{_RAT}\*|[+-]?)sqrt\((?P<d>\d+)\)$")


def _parse_rational(text: str) -> Fraction:
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def parse_scalar(text: str) -> Scalar:
    """Parse the textual scalar form; also accepts ``a-b*sqrt(d)`` and ``sqrt(d)``."""
    t = text.strip()
    if _RATIONAL_RE.match(t):
        return _parse_rational(t)
    m = _QUADRATIC_RE.match(t)
    if not m:
        raise ParseError(f"malformed scalar {text!r}")
    a = _parse_rational(m.group("a")) if m.group("a") else Fraction(0)
    braw = m.group("b").rstrip("*")
    b = Fraction(-1 if braw == "-" else 1) if braw in ("", "+", "-") else _parse_rational(braw)
    if m.group("op") == "-":
        b = -b
    radicand = int(m.group("d"))
    if radicand == 0:
        return a
    s, d = squarefree_decompose(radicand)
    if d == 1:
        return a + b * s
    return QuadraticNumber(a, b * s, d)
