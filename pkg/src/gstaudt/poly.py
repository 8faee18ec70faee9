"""Integer polynomial systems: parsing, inequality elimination, atomization.

The textual grammar is one constraint per line::

    x*y - 6 = 0
    x - 2 >= 0      # comments start with '#'

Variables match ``[a-zA-Z][a-zA-Z0-9_]*``; the right-hand side must be ``0``.
Names beginning with an underscore are reserved for generated variables
(``_y<k>`` slack, ``_c<n>`` constants, ``_a<k>`` intermediates, ``_f<i>``
differences), so they can never collide with user input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import PolySyntaxError, UnknownRelation
from .scalar import extension_of, sign, sqrt_exact, to_scalar

Monomial = tuple  # sorted tuple of (variable, exponent >= 1) pairs

RELATIONS = ("=", "!=", "<", "<=", ">=", ">")


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    exps = dict(m1)
    for v, e in m2:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


class Polynomial:
    """Sparse polynomial with integer coefficients; immutable by convention."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        self.terms: dict[Monomial, int] = {m: c for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def var(cls, name: str) -> "Polynomial":
        return cls({((name, 1),): 1})

    @classmethod
    def const(cls, c: int) -> "Polynomial":
        if c != int(c):
            raise ValueError("polynomial coefficients must be integers")
        return cls({(): int(c)})

    @staticmethod
    def _lift(other) -> "Polynomial | None":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, int) or (isinstance(other, Fraction) and other.denominator == 1):
            return Polynomial.const(int(other))
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in o.terms.items():
            terms[m] = terms.get(m, 0) + c
        return Polynomial(terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = _mono_mul(m1, m2)
                terms[m] = terms.get(m, 0) + c1 * c2
        return Polynomial(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result, base = Polynomial.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def constant_value(self) -> int:
        """Value of a constant polynomial (raises for nonconstant ones)."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((), 0)

    def variables(self) -> set[str]:
        return {v for m in self.terms for v, _ in m}

    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def degree_in(self, name: str) -> int:
        return max((dict(m).get(name, 0) for m in self.terms), default=0)

    def split_linear(self, name: str) -> tuple["Polynomial", "Polynomial"]:
        """Write ``self == alpha*name + beta`` with ``name`` absent from alpha, beta."""
        alpha: dict[Monomial, int] = {}
        beta: dict[Monomial, int] = {}
        for m, c in self.terms.items():
            e = dict(m).get(name, 0)
            if e == 0:
                beta[m] = c
            elif e == 1:
                alpha[tuple(p for p in m if p[0] != name)] = c
            else:
                raise ValueError(f"{self} is not linear in {name}")
        return Polynomial(alpha), Polynomial(beta)

    def evaluate(self, assign: Mapping[str, object]):
        total = Fraction(0)
        for m, c in self.terms.items():
            val = Fraction(c)
            for v, e in m:
                val = val * to_scalar(assign[v]) ** e
            total = total + val
        return total

    def _sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: (-sum(e for _, e in mc[0]), mc[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, (m, c) in enumerate(self._sorted_terms()):
            factors = [v if e == 1 else f"{v}^{e}" for v, e in m]
            if abs(c) != 1 or not factors:
                factors.insert(0, str(abs(c)))
            body = "*".join(factors)
            if k == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


# ---------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<rel>[<>=!]+)|(?P<op>[-+*^()])")


def _tokenize(text: str, lineno: int, allow_reserved: bool = False):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise PolySyntaxError(f"unexpected character {text[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group(kind)
            if kind == "name" and value.startswith("_") and not allow_reserved:
                raise PolySyntaxError(f"variable names may not start with '_': {value!r}",
                                      lineno, pos + 1)
            if kind == "rel" and value not in RELATIONS:
                raise UnknownRelation(f"unknown relation {value!r}", lineno, pos + 1)
            tokens.append((kind, value, pos + 1))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, tokens, lineno):
        self.tokens = tokens
        self.i = 0
        self.lineno = lineno

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        shown = tok[1] or "end of line"
        raise PolySyntaxError(f"{msg}, found {shown!r}", self.lineno, tok[2])

    def expr(self) -> Polynomial:
        negate = False
        if self.peek()[:2] in (("op", "+"), ("op", "-")):
            negate = self.take()[1] == "-"
        result = self.term()
        if negate:
            result = -result
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> Polynomial:
        result = self.factor()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            result = result * self.factor()
        return result

    def factor(self) -> Polynomial:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            tok = self.peek()
            if tok[0] != "num":
                self.fail("expected an integer exponent after '^'")
            self.take()
            base = base ** int(tok[1])
        return base

    def atom(self) -> Polynomial:
        tok = self.peek()
        if tok[0] == "num":
            self.take()
            return Polynomial.const(int(tok[1]))
        if tok[0] == "name":
            self.take()
            return Polynomial.var(tok[1])
        if tok[:2] == ("op", "("):
            self.take()
            inner = self.expr()
            if self.peek()[:2] != ("op", ")"):
                self.fail("expected ')'")
            self.take()
            return inner
        self.fail("expected a number, variable or '('")


@dataclass(frozen=True)
class PolyConstraint:
    """``lhs rel 0``."""

    lhs: Polynomial
    rel: str

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise UnknownRelation(f"unknown relation {self.rel!r}")

    def holds(self, assign: Mapping[str, object]) -> bool:
        s = sign(self.lhs.evaluate(assign))
        return {"=": s == 0, "!=": s != 0, "<": s < 0, "<=": s <= 0,
                ">=": s >= 0, ">": s > 0}[self.rel]

    def __str__(self):
        return f"{self.lhs} {self.rel} 0"


def parse_constraint(line: str, lineno: int = 1) -> PolyConstraint:
    tokens = _tokenize(line, lineno)
    p = _Parser(tokens, lineno)
    lhs = p.expr()
    tok = p.peek()
    if tok[0] != "rel":
        p.fail("expected a relation")
    rel = p.take()[1]
    tok = p.peek()
    if tok[:2] != ("num", "0"):
        p.fail("right-hand side must be 0")
    p.take()
    if p.peek()[0] != "end":
        p.fail("unexpected trailing input")
    return PolyConstraint(lhs, rel)


def parse_system(text: str) -> list[PolyConstraint]:
    """Parse a system, one constraint per nonblank, non-comment line."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if line.strip():
            out.append(parse_constraint(line, lineno))
    return out


def format_system(cs: Iterable[PolyConstraint]) -> str:
    return "".join(f"{c}\n" for c in cs)


def symbol_count(p: Polynomial) -> int:
    """Number of grammar tokens needed to write ``p``."""
    return len(_tokenize(str(p), 0, allow_reserved=True)) - 1


# ------------------------------------------------- inequality elimination

def _slack(k: int) -> str:
    return f"_y{k}"


def eliminate_inequalities(cs: Iterable[PolyConstraint]) -> list[Polynomial]:
    """Rewrite a mixed system into equations ``p = 0`` using fresh slack variables.

    ``f != 0 -> y*f - 1``, ``f > 0 -> y^2*f - 1``, ``f >= 0 -> f - y^2``;
    ``<`` and ``<=`` negate ``f`` first.  Equisatisfiable over Euclidean fields.
    """
    out = []
    k = 0
    for c in cs:
        f = c.lhs
        if c.rel == "=":
            out.append(f)
            continue
        k += 1
        y = Polynomial.var(_slack(k))
        if c.rel in ("<", "<="):
            f = -f
        if c.rel == "!=":
            out.append(y * f - 1)
        elif c.rel in (">", "<"):
            out.append(y * y * f - 1)
        else:
            out.append(f - y * y)
    return out


def lift_assignment(cs: Iterable[PolyConstraint], assign: Mapping[str, object]) -> dict:
    """Extend a solution of ``cs`` by the slack values used in :func:`eliminate_inequalities`.

    Square roots are taken exactly in Q or in the quadratic field already used
    by ``assign``; :class:`~gstaudt.errors.NotASquare` is raised otherwise.
    """
    lifted = {k: to_scalar(v) for k, v in assign.items()}
    d = extension_of(lifted.values())
    k = 0
    for c in cs:
        if c.rel == "=":
            continue
        k += 1
        f = c.lhs.evaluate(lifted)
        if c.rel in ("<", "<="):
            f = -f
        if c.rel == "!=":
            if f == 0:
                raise ValueError(f"constraint {c} is violated")
            y = 1 / f
        elif c.rel in (">", "<"):
            if f == 0:
                raise ValueError(f"constraint {c} is violated")
            y = sqrt_exact(1 / f, d)
        else:
            y = sqrt_exact(f, d)
        d = extension_of([y]) if d == 1 else d
        lifted[_slack(k)] = y
    return lifted


def project_assignment(assign: Mapping[str, object]) -> dict:
    """Drop generated variables (names starting with ``_``)."""
    return {k: v for k, v in assign.items() if not k.startswith("_")}


# -------------------------------------------------------------- atomization

@dataclass(frozen=True)
class Unit:
    v: str


@dataclass(frozen=True)
class Sum:
    """``c = a + b``.  When ``c`` is already defined the atom instead defines ``a = c - b``."""

    a: str
    b: str
    c: str


@dataclass(frozen=True)
class Prod:
    a: str
    b: str
    c: str


Atom = Union[Unit, Sum, Prod]


@dataclass(frozen=True)
class AtomicSystem:
    """Atoms in evaluation order plus the designated input and output variables.

    A ``Sum(a, b, c)`` whose ``c`` was defined earlier is a *closing* atom: it
    is how a difference ``a = c - b`` is expressed with the two atom forms.
    Its ``a`` is a *free* variable, defined by this atom alone.
    """

    atoms: tuple
    inputs: tuple
    outputs: tuple
    free: tuple = field(init=False)
    closing: frozenset = field(init=False)

    def __post_init__(self):
        defined = set(self.inputs)
        if len(defined) != len(self.inputs):
            raise ValueError("duplicate input variable")
        free, closing = [], set()

        def need(v, atom):
            if v not in defined:
                raise ValueError(f"{atom} uses undefined variable {v!r}")

        def define(v, atom):
            if v in defined:
                raise ValueError(f"{atom} redefines {v!r}")
            defined.add(v)

        for k, atom in enumerate(self.atoms):
            if isinstance(atom, Unit):
                define(atom.v, atom)
            elif isinstance(atom, Sum) and atom.c in defined and atom.a not in defined:
                need(atom.b, atom)
                define(atom.a, atom)
                free.append(atom.a)
                closing.add(k)
            elif isinstance(atom, (Sum, Prod)):
                need(atom.a, atom)
                need(atom.b, atom)
                define(atom.c, atom)
            else:
                raise TypeError(f"not an atom: {atom!r}")
        for v in self.outputs:
            if v not in defined:
                raise ValueError(f"output {v!r} is never defined")
        object.__setattr__(self, "free", tuple(free))
        object.__setattr__(self, "closing", frozenset(closing))

    def evaluate(self, assign: Mapping[str, object]) -> dict:
        values = {v: to_scalar(assign[v]) for v in self.inputs}
        for k, atom in enumerate(self.atoms):
            if isinstance(atom, Unit):
                values[atom.v] = Fraction(1)
            elif k in self.closing:
                values[atom.a] = values[atom.c] - values[atom.b]
            elif isinstance(atom, Sum):
                values[atom.c] = values[atom.a] + values[atom.b]
            else:
                values[atom.c] = values[atom.a] * values[atom.b]
        return values

    def output_values(self, assign: Mapping[str, object]) -> list:
        values = self.evaluate(assign)
        return [values[v] for v in self.outputs]


UNIT = "_c1"


class _Atomizer:
    def __init__(self):
        self.atoms: list[Atom] = [Unit(UNIT)]
        self.consts = {1: UNIT}
        self.powers: dict[tuple, str] = {}
        self.counter = 0

    def fresh(self) -> str:
        self.counter += 1
        return f"_a{self.counter}"

    def const(self, n: int) -> str:
        if n in self.consts:
            return self.consts[n]
        if n == 0:
            # 1 = _c0 + 1 defines the zero variable
            self.atoms.append(Sum("_c0", UNIT, UNIT))
            self.consts[0] = "_c0"
            return "_c0"
        bits = bin(n)[3:]
        cur, val = UNIT, 1
        for bit in bits:
            val *= 2
            cur = self._const_atom(val, cur, cur)
            if bit == "1":
                val += 1
                cur = self._const_atom(val, cur, UNIT)
        return cur

    def _const_atom(self, val, a, b):
        if val not in self.consts:
            self.consts[val] = f"_c{val}"
            self.atoms.append(Sum(a, b, self.consts[val]))
        return self.consts[val]

    def _prod(self, key, a, b) -> str:
        if key not in self.powers:
            self.powers[key] = self.fresh()
            self.atoms.append(Prod(a, b, self.powers[key]))
        return self.powers[key]

    def power(self, v: str, e: int) -> str:
        cur, val = v, 1
        for bit in bin(e)[3:]:
            val *= 2
            cur = self._prod(((v, val),), cur, cur)
            if bit == "1":
                val += 1
                cur = self._prod(((v, val),), cur, v)
        return cur

    def monomial(self, m: Monomial) -> str:
        acc = None
        for k, (v, e) in enumerate(m):
            p = self.power(v, e)
            acc = p if acc is None else self._prod(m[: k + 1], acc, p)
        return acc

    def term(self, m: Monomial, c: int) -> str:
        if not m:
            return self.const(c)
        mv = self.monomial(m)
        if c == 1:
            return mv
        return self._prod(("*", c, m), self.const(c), mv)

    def add_all(self, names: list[str]) -> str | None:
        acc = None
        for n in names:
            if acc is None:
                acc = n
            else:
                c = self.fresh()
                self.atoms.append(Sum(acc, n, c))
                acc = c
        return acc

    def polynomial(self, f: Polynomial, index: int) -> str:
        ordered = f._sorted_terms()
        pos = self.add_all([self.term(m, c) for m, c in ordered if c > 0])
        neg = self.add_all([self.term(m, -c) for m, c in ordered if c < 0])
        if neg is None:
            return pos if pos is not None else self.const(0)
        if pos is None:
            pos = self.const(0)
        out = f"_f{index}"
        self.atoms.append(Sum(out, neg, pos))
        return out


def atomize(eqs: Iterable[Polynomial], inputs: Iterable[str] | None = None) -> AtomicSystem:
    """Rewrite polynomials into Unit/Sum/Prod atoms; one output variable per polynomial."""
    eqs = list(eqs)
    if inputs is None:
        inputs = sorted(set().union(*(f.variables() for f in eqs)))
    at = _Atomizer()
    outputs = [at.polynomial(f, i) for i, f in enumerate(eqs, start=1)]
    return AtomicSystem(tuple(at.atoms), tuple(inputs), tuple(outputs))


def atomize_bound(eqs: Iterable[Polynomial]) -> int:
    """Upper bound on ``len(atomize(eqs).atoms)``.

    Linear in the number of terms, coefficient bit lengths and exponent bit lengths.
    """
    total = 2  # Unit and a possible zero constant
    for f in eqs:
        total += 1
        for m, c in f.terms.items():
            total += 2 + 2 * abs(c).bit_length()
            total += sum(1 + 2 * e.bit_length() for _, e in m)
    return total
