"""CI statements and their interpretation on exact symmetric matrices."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Iterable, Mapping, Sequence

from .errors import (
    IllDefinedInterpretation,
    InconsistentInterpretation,
    ParseError,
    SingularConditioningBlock,
    SizeGuardExceeded,
    UnknownLabel,
)
from .scalar import QuadraticNumber, format_scalar, parse_scalar, sign, to_scalar

DEFAULT_MAX_N = 20


def max_n_default() -> int:
    """Size limit for exponential checks; ``GSTAUDT_MAX_N`` overrides it."""
    return int(os.environ.get("GSTAUDT_MAX_N", DEFAULT_MAX_N))


# ------------------------------------------------------- exact linear algebra

def _integralize(rows):
    """Scale a rational matrix to integers: returns ``(int rows, L)`` or ``(None, None)``."""
    if any(isinstance(x, QuadraticNumber) for r in rows for x in r):
        return None, None
    L = 1
    for r in rows:
        for x in r:
            L = lcm(L, x.denominator)
    return [[x.numerator * (L // x.denominator) for x in r] for r in rows], L


def _bareiss_det(a, div) -> object:
    n = len(a)
    sgn, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sgn = -sgn
                    break
            else:
                return 0
        pk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = div(row_i[j] * pk - aik * row_k[j], prev)
        prev = pk
    return sgn * a[n - 1][n - 1]


def _exact_int_div(x, y):
    return x // y


def _field_div(x, y):
    return x / y


def det(rows: Sequence[Sequence]) -> object:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    ints, L = _integralize(rows)
    if ints is not None:
        return Fraction(_bareiss_det(ints, _exact_int_div), L ** n)
    return to_scalar(_bareiss_det([list(r) for r in rows], _field_div))


def _is_symmetric(a) -> bool:
    return all(a[i][j] == a[j][i] for i in range(len(a)) for j in range(i))


def leading_minor_signs(rows) -> list[int]:
    """Signs of the leading principal minors, stopping after the first zero."""
    if _is_symmetric(rows) and not any(isinstance(x, QuadraticNumber) for r in rows for x in r):
        # D A D with d_i the row denominator: integral, same leading-minor signs
        d = [lcm(*(x.denominator for x in r)) for r in rows]
        return _symmetric_int_signs([[x.numerator * (d[i] // x.denominator) * d[j]
                                      for j, x in enumerate(r)] for i, r in enumerate(rows)])
    ints, _ = _integralize(rows)
    a, div = (ints, _exact_int_div) if ints is not None else ([list(r) for r in rows], _field_div)
    n = len(a)
    signs = []
    prev = 1
    for k in range(n):
        pk = a[k][k]
        signs.append(sign(to_scalar(pk)))
        if pk == 0:
            break
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                a[i][j] = div(a[i][j] * pk - aik * a[k][j], prev)
        prev = pk
    return signs


def _symmetric_int_signs(a) -> list[int]:
    # Bareiss intermediates of a symmetric matrix stay symmetric: update j >= i only
    n = len(a)
    signs = []
    prev = 1
    for k in range(n):
        row_k = a[k]
        pk = row_k[k]
        signs.append((pk > 0) - (pk < 0))
        if pk == 0:
            break
        for i in range(k + 1, n):
            aik = row_k[i]
            row_i = a[i]
            row_i[i:] = [(x * pk - aik * y) // prev for x, y in zip(row_i[i:], row_k[i:])]
        prev = pk
    return signs


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank by fraction-free elimination with row and column search."""
    if not rows or not rows[0]:
        return 0
    ints, _ = _integralize(rows)
    a, div = (ints, _exact_int_div) if ints is not None else ([list(r) for r in rows], _field_div)
    m, n = len(a), len(a[0])
    r, prev = 0, 1
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pk = a[r][c]
        for i in range(r + 1, m):
            aic = a[i][c]
            for j in range(c + 1, n):
                a[i][j] = div(a[i][j] * pk - aic * a[r][j], prev)
            a[i][c] = 0
        prev = pk
        r += 1
        if r == m:
            break
    return r


def solve(rows, rhs) -> list:
    """Solve a nonsingular square system by Gauss-Jordan over the scalars."""
    n = len(rows)
    a = [list(rows[i]) + [rhs[i]] for i in range(n)]
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            raise SingularConditioningBlock("singular system")
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [a[i][n] for i in range(n)]


# ------------------------------------------------------------------ matrices

class SymMatrix:
    """Symmetric matrix of exact scalars indexed by an ordered list of labels."""

    def __init__(self, labels: Sequence[str], rows: Sequence[Sequence]):
        labels = tuple(labels)
        n = len(labels)
        if len(set(labels)) != n:
            raise ValueError("duplicate labels")
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError("matrix shape does not match labels")
        rows = tuple(tuple(to_scalar(x) for x in r) for r in rows)
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"not symmetric at ({labels[i]}, {labels[j]})")
        self.labels = labels
        self.rows = rows
        self.index = {lab: k for k, lab in enumerate(labels)}
        self._cache: dict = {}

    @classmethod
    def from_pairs(cls, labels: Sequence[str], entries: Mapping[tuple, object], default=0):
        """Build from a mapping of unordered label pairs (either orientation) to values."""
        labels = tuple(labels)
        idx = {lab: k for k, lab in enumerate(labels)}
        n = len(labels)
        rows = [[to_scalar(default)] * n for _ in range(n)]
        for (a, b), v in entries.items():
            i, j = idx[a], idx[b]
            rows[i][j] = rows[j][i] = to_scalar(v)
        return cls(labels, rows)

    @classmethod
    def from_upper(cls, labels: Sequence[str], values: Sequence):
        n = len(labels)
        if len(values) != n * (n + 1) // 2:
            raise ValueError(f"expected {n * (n + 1) // 2} upper-triangle entries, got {len(values)}")
        rows = [[Fraction(0)] * n for _ in range(n)]
        it = iter(values)
        for i in range(n):
            for j in range(i, n):
                rows[i][j] = rows[j][i] = to_scalar(next(it))
        return cls(labels, rows)

    @property
    def n(self) -> int:
        return len(self.labels)

    def pos(self, label: str) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise UnknownLabel(f"unknown label {label!r}") from None

    def __getitem__(self, key):
        a, b = key
        return self.rows[self.pos(a)][self.pos(b)]

    def ordered(self, labels: Iterable[str]) -> list[str]:
        return sorted(set(labels), key=self.pos)

    def submatrix(self, row_labels: Sequence[str], col_labels: Sequence[str]):
        ri = [self.pos(a) for a in row_labels]
        ci = [self.pos(b) for b in col_labels]
        return [[self.rows[i][j] for j in ci] for i in ri]

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return self.labels == other.labels and self.rows == other.rows

    def __repr__(self):
        return f"SymMatrix({self.labels!r})"


# --------------------------------------------------------------- statements

@dataclass(frozen=True, eq=False)
class CIStatement:
    """The symbol (ij|K); equality ignores the orientation of the pair."""

    i: str
    j: str
    K: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "K", frozenset(self.K))
        if self.i == self.j:
            raise ValueError(f"CI statement needs distinct i, j (got {self.i!r} twice)")
        if self.i in self.K or self.j in self.K:
            raise ValueError("i and j must not lie in the conditioning set")

    def key(self):
        return (frozenset((self.i, self.j)), self.K)

    def __eq__(self, other):
        if not isinstance(other, CIStatement):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def labels(self) -> set:
        return {self.i, self.j} | self.K

    def format(self, order: Mapping[str, int] | None = None) -> str:
        rank_of_label = (lambda x: (order[x], x)) if order else (lambda x: x)
        i, j = sorted((self.i, self.j), key=rank_of_label)
        K = sorted(self.K, key=rank_of_label)
        return f"({i},{j}|{' '.join(K)})"

    def __str__(self):
        return self.format()


@dataclass(frozen=True)
class CIConstraint:
    stmt: CIStatement
    independent: bool = True

    @property
    def polarity(self) -> str:
        return "independence" if self.independent else "dependence"

    def format(self, order=None) -> str:
        return ("" if self.independent else "!") + self.stmt.format(order)

    def __str__(self):
        return self.format()


_STMT_RE = re.compile(r"^\(\s*([^,|()\s]+)\s*,\s*([^,|()\s]+)\s*\|([^|()]*)\)$")


def parse_statement(text: str) -> CIStatement:
    m = _STMT_RE.match(text.strip())
    if not m:
        raise ParseError(f"malformed CI statement {text!r}")
    try:
        return CIStatement(m.group(1), m.group(2), frozenset(m.group(3).split()))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def parse_constraint(text: str) -> CIConstraint:
    t = text.strip()
    neg = t.startswith(("!", "¬"))
    return CIConstraint(parse_statement(t[1:] if neg else t), not neg)


# ---------------------------------------------------------------- operations

def _minor(S: SymMatrix, rows: Sequence[str], cols: Sequence[str]):
    key = (tuple(rows), tuple(cols))
    cache = S._cache.setdefault("minors", {})
    if key not in cache:
        cache[key] = det(S.submatrix(rows, cols))
    return cache[key]


def principal_minor(S: SymMatrix, K: Iterable[str]):
    Ks = S.ordered(K)
    return _minor(S, Ks, Ks)


def almost_principal_minor(S: SymMatrix, i: str, j: str, K: Iterable[str]):
    Ks = S.ordered(K)
    S.pos(i), S.pos(j)
    return _minor(S, [i] + Ks, [j] + Ks)


def schur_value(S: SymMatrix, i: str, j: str, K: Iterable[str]):
    """``S_ij - S_iK S_K^-1 S_Kj``, computed by a linear solve (not via minors)."""
    Ks = S.ordered(K)
    if not Ks:
        return S[i, j]
    if principal_minor(S, Ks) == 0:
        raise SingularConditioningBlock(f"pr({' '.join(Ks)}) = 0")
    x = solve(S.submatrix(Ks, Ks), [S[k, j] for k in Ks])
    return S[i, j] - sum((S[i, k] * xk for k, xk in zip(Ks, x)), Fraction(0))


def rank_of(S: SymMatrix, K: Iterable[str]) -> int:
    Ks = S.ordered(K)
    return rank(S.submatrix(Ks, Ks))


def is_positive_definite(S: SymMatrix) -> bool:
    """Sylvester's criterion: every leading principal minor is positive."""
    if "pd" not in S._cache:
        signs = leading_minor_signs(S.rows)
        S._cache["pd"] = len(signs) == S.n and all(s > 0 for s in signs)
    return S._cache["pd"]


def _guard(S: SymMatrix, what: str, max_n: int | None):
    limit = max_n_default() if max_n is None else max_n
    if S.n > limit:
        raise SizeGuardExceeded(
            f"{what} enumerates 2^{S.n} subsets; raise GSTAUDT_MAX_N (now {limit}) to allow it")


def _subsets(labels, min_size=1):
    for r in range(min_size, len(labels) + 1):
        yield from combinations(labels, r)


def is_principally_regular(S: SymMatrix, max_n: int | None = None) -> bool:
    """All principal minors nonzero.  Positive-definite matrices pass without enumeration."""
    if "regular" not in S._cache:
        if is_positive_definite(S):
            S._cache["regular"] = True
        else:
            _guard(S, "principal regularity check", max_n)
            S._cache["regular"] = all(principal_minor(S, K) != 0 for K in _subsets(S.labels))
    return S._cache["regular"]


def is_positive_semidefinite(S: SymMatrix, max_n: int | None = None) -> bool:
    """Every principal minor is nonnegative."""
    if "psd" not in S._cache:
        if is_positive_definite(S):
            S._cache["psd"] = True
        else:
            _guard(S, "semidefiniteness check", max_n)
            S._cache["psd"] = all(sign(principal_minor(S, K)) >= 0 for K in _subsets(S.labels))
    return S._cache["psd"]


def is_diagonally_spanning(S: SymMatrix, max_n: int | None = None) -> bool:
    """For every split N = U + V the columns of S_UV lie in the column span of S_U."""
    if "dspan" not in S._cache:
        _guard(S, "diagonal spanning check", max_n)
        ok = True
        for U in _subsets(S.labels):
            V = [v for v in S.labels if v not in U]
            if not V:
                continue
            A = S.submatrix(U, U)
            AB = S.submatrix(U, list(U) + V)
            if rank(AB) != rank(A):
                ok = False
                break
        S._cache["dspan"] = ok
    return S._cache["dspan"]


def _check_stmt(S: SymMatrix, stmt: CIStatement):
    for lab in stmt.labels():
        S.pos(lab)


def ci_holds_regular(S: SymMatrix, stmt: CIStatement, full_check: bool = False) -> bool:
    _check_stmt(S, stmt)
    if full_check and not is_principally_regular(S):
        raise SingularConditioningBlock("matrix is not principally regular")
    if principal_minor(S, stmt.K) == 0:
        raise SingularConditioningBlock(f"pr({' '.join(S.ordered(stmt.K))}) = 0")
    return almost_principal_minor(S, stmt.i, stmt.j, stmt.K) == 0


def semidefinite_conditioning_sets(S: SymMatrix, K: Iterable[str]) -> list[tuple]:
    """All L in K with pr(L) != 0 and rk S_L = rk S_K, lexicographic in label order."""
    Ks = S.ordered(K)
    r = rank_of(S, Ks)
    return [L for L in combinations(Ks, r) if principal_minor(S, L) != 0]


def semidefinite_well_defined(S: SymMatrix, max_n: int | None = None) -> bool:
    return is_positive_semidefinite(S, max_n) or is_diagonally_spanning(S, max_n)


def ci_holds_semidefinite(S: SymMatrix, stmt: CIStatement, mode: str = "first",
                          max_n: int | None = None) -> bool:
    """Interpret (ij|K) through a full-rank principal subset L of K.

    ``first`` uses the lexicographically smallest L and requires a matrix on
    which the choice cannot matter (semidefinite or diagonally spanning).
    ``strict`` evaluates every admissible L and raises on disagreement.
    """
    _check_stmt(S, stmt)
    if mode not in ("first", "strict"):
        raise ValueError(f"unknown mode {mode!r}")
    candidates = semidefinite_conditioning_sets(S, stmt.K)
    if mode == "first":
        if not semidefinite_well_defined(S, max_n):
            raise IllDefinedInterpretation(
                "matrix is neither positive-semidefinite nor diagonally spanning; use mode=strict")
        return almost_principal_minor(S, stmt.i, stmt.j, candidates[0]) == 0
    verdicts = {L: almost_principal_minor(S, stmt.i, stmt.j, L) == 0 for L in candidates}
    if len(set(verdicts.values())) > 1:
        detail = ", ".join(f"L={{{' '.join(L)}}}: {'holds' if v else 'fails'}"
                           for L, v in verdicts.items())
        raise InconsistentInterpretation(f"{stmt} depends on the choice of L ({detail})")
    return next(iter(verdicts.values()))


def ci_holds(S: SymMatrix, stmt: CIStatement, semantics: str = "regular", mode: str = "first",
             max_n: int | None = None) -> bool:
    if semantics == "regular":
        return ci_holds_regular(S, stmt)
    if semantics == "semidefinite":
        return ci_holds_semidefinite(S, stmt, mode, max_n)
    raise ValueError(f"unknown semantics {semantics!r}")


@dataclass
class Verdict:
    constraint: CIConstraint
    satisfied: bool
    holds: bool | None = None  # whether the statement holds; None when undefined
    error: str | None = None


@dataclass
class CheckReport:
    semantics: str
    side_condition: str
    side_ok: bool | None
    verdicts: list

    @property
    def ok(self) -> bool:
        return self.side_ok is not False and all(v.satisfied for v in self.verdicts)

    @property
    def failures(self) -> list:
        return [v for v in self.verdicts if not v.satisfied]

    def format(self, order=None) -> str:
        lines = []
        for v in self.verdicts:
            status = "ok  " if v.satisfied else "FAIL"
            note = f"  # {v.error}" if v.error else ""
            lines.append(f"{status} {v.constraint.format(order)}{note}")
        side = {True: "ok", False: "FAIL", None: "skipped"}[self.side_ok]
        lines.append(f"{self.side_condition}: {side}")
        lines.append(f"verdict: {'satisfied' if self.ok else 'violated'} "
                     f"({len(self.failures)} of {len(self.verdicts)} constraints fail)")
        return "\n".join(lines) + "\n"


def check_constraints(S: SymMatrix, constraints: Iterable, semantics: str = "regular",
                      mode: str = "first", side_condition: bool = True,
                      max_n: int | None = None) -> CheckReport:
    """Evaluate every constraint plus the regularity/semidefiniteness side condition."""
    constraints = [getattr(c, "constraint", c) for c in constraints]
    if semantics == "regular":
        side_name = "principal regularity"
        side_ok = is_principally_regular(S, max_n) if side_condition else None
    elif semantics == "semidefinite":
        side_name = "positive semidefiniteness"
        side_ok = is_positive_semidefinite(S, max_n) if side_condition else None
    else:
        raise ValueError(f"unknown semantics {semantics!r}")
    verdicts = []
    for c in constraints:
        try:
            h = ci_holds(S, c.stmt, semantics, mode, max_n)
            verdicts.append(Verdict(c, h == c.independent, h))
        except (SingularConditioningBlock, InconsistentInterpretation,
                IllDefinedInterpretation) as exc:
            verdicts.append(Verdict(c, False, None, str(exc)))
    return CheckReport(semantics, side_name, side_ok, verdicts)


def all_statements(labels: Sequence[str]) -> list[CIStatement]:
    out = []
    for i, j in combinations(labels, 2):
        rest = [k for k in labels if k not in (i, j)]
        for K in _subsets(rest, 0):
            out.append(CIStatement(i, j, frozenset(K)))
    return out


def realized_structure(S: SymMatrix, semantics: str = "regular", mode: str = "first",
                       max_n: int | None = None) -> set:
    """Every statement (ij|K) over the ground set which holds for ``S``."""
    return {st for st in all_statements(S.labels) if ci_holds(S, st, semantics, mode, max_n)}


# ------------------------------------------------------------------ file I/O

def format_matrix(S: SymMatrix, header: str = "") -> str:
    lines = [header.rstrip("\n")] if header else []
    lines.append("labels: " + " ".join(S.labels))
    for i in range(S.n):
        lines.append(" ".join(format_scalar(S.rows[i][j]) for j in range(i, S.n)))
    return "\n".join(lines) + "\n"


def read_matrix(text: str) -> SymMatrix:
    labels = None
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if labels is None:
            if not line.startswith("labels:"):
                raise ParseError("matrix file must start with 'labels:'", lineno)
            labels = line[len("labels:"):].split()
            continue
        for tok in line.split():
            try:
                values.append(parse_scalar(tok))
            except ParseError as exc:
                raise ParseError(str(exc), lineno) from None
    if labels is None:
        raise ParseError("empty matrix file")
    try:
        return SymMatrix.from_upper(labels, values)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
