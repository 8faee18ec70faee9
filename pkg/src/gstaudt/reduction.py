"""From CI constraint sets to polynomial systems over a generic symmetric matrix.

Each entry of the matrix becomes a variable ``s{p}_{q}`` (1-based positions in
the ground order, ``p <= q``).  Minors up to 3x3 are written out in closed
form.  Larger ones are eliminated pivot by pivot: every modified entry gets a
fresh variable ``e`` with the division-free definition

    p * e - p * a_rc + a_rk * a_kc = 0        (e = a_rc - a_rk a_kc / p)

and a value variable ``m{k}`` is tied to the product of the pivots, which is
the determinant.  Each defining equation is linear in its variable, so the
fresh variables are computed by forward substitution once the pivots are
nonzero, which the side conditions guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .cicore import SymMatrix
from .encoder import ConstraintSet
from .errors import SizeGuardExceeded
from .poly import PolyConstraint, Polynomial, eliminate_inequalities, symbol_count
from .scalar import to_scalar

CLOSED_FORM_MAX = 3
DEFAULT_REDUCE_MAX_N = 12
MODES = ("principally-regular", "positive-definite")


def closed_form_det(M: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Laplace expansion along the first row."""
    n = len(M)
    if n == 0:
        return Polynomial.const(1)
    if n == 1:
        return M[0][0]
    total = Polynomial.const(0)
    for c in range(n):
        if M[0][c]:
            minor = [row[:c] + row[c + 1:] for row in M[1:]]
            term = M[0][c] * closed_form_det(minor)
            total = total + term if c % 2 == 0 else total - term
    return total


@dataclass
class MinorEncoding:
    value: Polynomial           # equals the minor on every solution of the equations
    equations: list             # defining equations, in forward-substitution order
    defines: list               # the variable each equation defines
    pivots: list                # pivot expressions (empty for closed forms)


def minor_equations(rows: Sequence[str], cols: Sequence[str], entry, prefix: str) -> MinorEncoding:
    """Encode ``det M[rows, cols]`` where ``entry(a, b)`` gives the polynomial for one entry.

    Fresh names are ``{prefix}`` for the value and ``{prefix}_{k}_{r}_{c}`` for
    the entry at row ``r``, column ``c`` after eliminating pivot ``k``.
    """
    n = len(rows)
    if n != len(cols):
        raise ValueError("minor needs as many rows as columns")
    A = [[entry(a, b) for b in cols] for a in rows]
    if n <= CLOSED_FORM_MAX:
        return MinorEncoding(closed_form_det(A), [], [], [])
    eqs, defs, pivots = [], [], []
    for k in range(n - 1):
        p = A[k][k]
        pivots.append(p)
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                name = f"{prefix}_{k + 1}_{r + 1}_{c + 1}"
                e = Polynomial.var(name)
                eqs.append(p * e - p * A[r][c] + A[r][k] * A[k][c])
                defs.append(name)
                A[r][c] = e
    pivots.append(A[n - 1][n - 1])
    v = Polynomial.var(prefix)
    prod = Polynomial.const(1)
    for p in pivots:
        prod = prod * p
    eqs.append(v - prod)
    defs.append(prefix)
    return MinorEncoding(v, eqs, defs, pivots)


@dataclass
class GenericSystem:
    labels: tuple
    equations: list = field(default_factory=list)
    inequations: list = field(default_factory=list)   # != 0
    inequalities: list = field(default_factory=list)  # > 0
    definitions: list = field(default_factory=list)   # (variable, equation) in substitution order
    notes: list = field(default_factory=list)         # per-constraint provenance comments
    n_minors: int = 0

    def sigma_name(self, a: str, b: str) -> str:
        p, q = sorted((self.labels.index(a) + 1, self.labels.index(b) + 1))
        return f"s{p}_{q}"

    def sigma_names(self) -> dict:
        return {(a, b): self.sigma_name(a, b)
                for i, a in enumerate(self.labels) for b in self.labels[i:]}

    def constraints(self) -> list[PolyConstraint]:
        return ([PolyConstraint(p, "=") for p in self.equations]
                + [PolyConstraint(p, "!=") for p in self.inequations]
                + [PolyConstraint(p, ">") for p in self.inequalities])

    def variables(self) -> set:
        out = set()
        for c in self.constraints():
            out |= c.lhs.variables()
        return out

    def fresh_variables(self) -> list:
        return [v for v, _ in self.definitions]

    def symbol_count(self) -> int:
        return sum(symbol_count(c.lhs) + 2 for c in self.constraints())

    def satisfied_by(self, assign: Mapping[str, object]) -> bool:
        return all(c.holds(assign) for c in self.constraints())


class _Builder:
    def __init__(self, labels):
        self.sys = GenericSystem(tuple(labels))
        self.order = {lab: k for k, lab in enumerate(labels)}
        self.cache: dict = {}
        self.count = 0

    def entry(self, a, b):
        return Polynomial.var(self.sys.sigma_name(a, b))

    def minor(self, rows: tuple, cols: tuple) -> Polynomial:
        key = (rows, cols)
        if key not in self.cache:
            self.count += 1
            enc = minor_equations(rows, cols, self.entry, f"m{self.count}")
            self.sys.equations.extend(enc.equations)
            self.sys.definitions.extend(zip(enc.defines, enc.equations))
            self.cache[key] = enc.value
        return self.cache[key]

    def sorted_labels(self, labels):
        return tuple(sorted(labels, key=self.order.__getitem__))

    def pr(self, K) -> Polynomial:
        Ks = self.sorted_labels(K)
        return self.minor(Ks, Ks)

    def apr(self, i, j, K) -> Polynomial:
        # K first, then i / j: the leading pivots are those of pr(K)
        Ks = self.sorted_labels(K)
        return self.minor(Ks + (i,), Ks + (j,))


def gci_to_system(cs: ConstraintSet, mode: str = "principally-regular", economical: bool = False,
                  max_n: int | None = None) -> GenericSystem:
    """Polynomial system whose real solutions are the matrices satisfying ``cs``.

    ``principally-regular`` adds ``pr(K) != 0`` for every nonempty K (or, with
    ``economical``, only for the prefixes of conditioning sets that occur and
    the leading minors).  ``positive-definite`` adds ``pr > 0`` for the
    leading minors, which by Sylvester's criterion is equivalent.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    labels = cs.ground.labels
    n = len(labels)
    b = _Builder(labels)
    sys = b.sys

    for c in cs.constraints:
        st = c.stmt
        i, j = sorted((st.i, st.j), key=b.order.__getitem__)
        v = b.apr(i, j, st.K)
        (sys.equations if c.independent else sys.inequations).append(v)
        sys.notes.append(f"{c.format(b.order)}")

    leading = [labels[:k] for k in range(1, n + 1)]
    if mode == "positive-definite":
        sys.inequalities.extend(b.pr(K) for K in leading)
        sys.n_minors = b.count
        return sys
    if economical:
        sides = list(leading)
        for c in cs.constraints:
            Ks = b.sorted_labels(c.stmt.K)
            sides.extend(Ks[:k] for k in range(1, len(Ks) + 1))
        side_sets = list(dict.fromkeys(sides))
    else:
        limit = DEFAULT_REDUCE_MAX_N if max_n is None else max_n
        if n > limit:
            raise SizeGuardExceeded(
                f"all 2^{n} principal minors requested; use the economical option or raise the limit ({limit})")
        side_sets = [K for r in range(1, n + 1) for K in combinations(labels, r)]
    sys.inequations.extend(b.pr(K) for K in side_sets)
    sys.n_minors = b.count
    return sys


def chain_to_equations(sys: GenericSystem) -> list[Polynomial]:
    """Fold inequations and inequalities into equations with slack variables."""
    return eliminate_inequalities(sys.constraints())


def sigma_assignment(sys: GenericSystem, S: SymMatrix) -> dict:
    return {name: S[a, b] for (a, b), name in sys.sigma_names().items()}


def forward_substitute(sys: GenericSystem, sigma: Mapping[str, object]) -> dict:
    """Solve the fresh-variable chain for given entry values.

    A defining equation whose coefficient vanishes (a zero pivot) leaves its
    variable unconstrained when the rest of the equation also vanishes; the
    variable is then set to 0.  Otherwise the chain has no solution.
    """
    assign = {k: to_scalar(v) for k, v in sigma.items()}
    for var, eq in sys.definitions:
        alpha, beta = eq.split_linear(var)
        a, b = alpha.evaluate(assign), beta.evaluate(assign)
        if a != 0:
            assign[var] = -b / a
        elif b == 0:
            assign[var] = Fraction(0)
        else:
            raise ValueError(f"definition of {var} is inconsistent at these entries")
    return assign


def format_generic_system(sys: GenericSystem, header: str = "") -> str:
    lines = [header.rstrip("\n")] if header else []
    for (a, b), name in sys.sigma_names().items():
        lines.append(f"# {name} = sigma({a},{b})")
    lines.extend(f"# constraint: {note}" for note in sys.notes)
    lines.extend(str(c) for c in sys.constraints())
    return "\n".join(lines) + "\n"


def cubic_bound_constant(sys: GenericSystem) -> Fraction:
    """Smallest C with symbol count <= C * (#minors) * n^3."""
    n = len(sys.labels)
    return Fraction(sys.symbol_count(), max(1, sys.n_minors) * max(1, n) ** 3)


def evaluate_minor_chain(enc: MinorEncoding, values: Mapping[str, object]):
    """Value of an encoded minor after forward substitution of its own equations."""
    assign = dict(values)
    for var, eq in zip(enc.defines, enc.equations):
        alpha, beta = eq.split_linear(var)
        a, b = alpha.evaluate(assign), beta.evaluate(assign)
        assign[var] = -b / a if a != 0 else Fraction(0)
    return enc.value.evaluate(assign)

