"""CI constraint sets describing a ruler construction.

The ground set is ``P + L + E``: one label per point, one per line and the
three coordinate labels ``x y z``.  Constraint families are tagged ``I.i``
through ``I.vii``:

* ``I.i``   coordinates of the four basis points
* ``I.ii``  indeterminate points lie on the x-axis and are affine
* ``I.iii`` the certified coordinate of every object is nonzero
* ``I.iv``  every pair of objects is independent given ``x y z``
* ``I.v``   incidences used by joins and meets
* ``I.vi``  outputs vanish: ``(f,x|)``
* ``I.vii`` optional guards on the pairwise products of basis points
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator

from .cicore import CIConstraint, CIStatement, parse_constraint
from .errors import ConstraintConflict, ParseError
from .projective import BASIS, COORDS, Trace

ORIGINS = ("I.i", "I.ii", "I.iii", "I.iv", "I.v", "I.vi", "I.vii")


@dataclass(frozen=True)
class GroundSet:
    P: tuple = ()
    L: tuple = ()
    E: tuple = COORDS

    def __post_init__(self):
        labels = self.P + self.L + self.E
        if len(set(labels)) != len(labels):
            raise ValueError("ground set blocks must be disjoint and duplicate-free")
        if self.E and tuple(self.E) != COORDS:
            raise ValueError("E must be exactly x y z")

    @classmethod
    def plain(cls, labels: Iterable[str]) -> "GroundSet":
        """A ground set without the point/line/coordinate structure."""
        return cls(tuple(labels), (), ())

    @property
    def is_plain(self) -> bool:
        return not self.E

    @property
    def labels(self) -> tuple:
        return self.P + self.L + self.E

    def order(self) -> dict:
        return {lab: k for k, lab in enumerate(self.labels)}

    def header(self) -> str:
        if self.is_plain:
            return "ground: " + " ".join(self.P)
        return (f"ground: P=({' '.join(self.P)}) L=({' '.join(self.L)}) "
                f"E=({' '.join(self.E)})")


@dataclass
class Entry:
    constraint: CIConstraint
    origins: list


@dataclass
class ConstraintSet:
    """Duplicate-free CI constraints, each tagged with every family that produced it."""

    ground: GroundSet
    entries: list = field(default_factory=list)
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._label_set = set(self.ground.labels)

    def add(self, c: CIConstraint, origin: str) -> None:
        if origin not in ORIGINS and origin != "input":
            raise ValueError(f"unknown origin {origin!r}")
        for lab in c.stmt.labels():
            if lab not in self._label_set:
                raise ValueError(f"label {lab!r} is not in the ground set")
        e = self._index.get(c.stmt)
        if e is None:
            e = Entry(c, [origin])
            self._index[c.stmt] = e
            self.entries.append(e)
        elif e.constraint.independent != c.independent:
            raise ConstraintConflict(
                f"{c.stmt} asserted with both polarities ({'/'.join(e.origins)} vs {origin})")
        elif origin not in e.origins:
            e.origins.append(origin)

    def copy(self) -> "ConstraintSet":
        out = ConstraintSet(self.ground)
        for e in self.entries:
            for o in e.origins:
                out.add(e.constraint, o)
        return out

    def ordered(self) -> list:
        """Entries grouped by family (first origin), otherwise in insertion order."""
        def block(e):
            o = e.origins[0]
            return ORIGINS.index(o) if o in ORIGINS else len(ORIGINS)
        return sorted(self.entries, key=block)

    @property
    def constraints(self) -> list:
        return [e.constraint for e in self.ordered()]

    def __iter__(self) -> Iterator[CIConstraint]:
        return iter(self.constraints)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, c):
        e = self._index.get(c.stmt)
        return e is not None and e.constraint.independent == c.independent

    def count_by_origin(self) -> dict:
        counts = dict.fromkeys(ORIGINS, 0)
        for e in self.entries:
            for o in e.origins:
                counts[o] = counts.get(o, 0) + 1
        return counts

    def origin_of(self, c) -> list:
        stmt = c.stmt if isinstance(c, CIConstraint) else c
        return list(self._index[stmt].origins)


def _indep(a, b, K=()):
    return CIConstraint(CIStatement(a, b, frozenset(K)), True)


def _dep(a, b, K=()):
    return CIConstraint(CIStatement(a, b, frozenset(K)), False)


def ground_of(t: Trace) -> GroundSet:
    return GroundSet(tuple(t.points), tuple(t.lines), COORDS)


def encode_trace(t: Trace) -> ConstraintSet:
    cs = ConstraintSet(ground_of(t))
    for p, vec in BASIS.items():
        for e, c in zip(COORDS, vec):
            cs.add(_indep(p, e) if c == 0 else _dep(p, e), "I.i")
    for p in list(t.inputs) + list(t.free):
        cs.add(_indep(p, "y"), "I.ii")
        cs.add(_dep(p, "z"), "I.ii")
    for a in t.objects:
        cs.add(_dep(a, t.certs[a]), "I.iii")
    for a, b in combinations(t.objects, 2):
        cs.add(_indep(a, b, COORDS), "I.iv")
    for st in t.steps:
        if st.kind == "join":
            pairs = ((st.a, st.result), (st.b, st.result))
        else:
            pairs = ((st.result, st.a), (st.result, st.b))
        for p, l in pairs:
            cs.add(_indep(p, l), "I.v")
    return cs


def add_vanishing_constraints(cs: ConstraintSet, outputs: Iterable[str]) -> ConstraintSet:
    out = cs.copy()
    for f in outputs:
        out.add(_indep(f, "x"), "I.vi")
    return out


def add_semidefinite_guards(cs: ConstraintSet) -> ConstraintSet:
    """Fix whether each pair of basis points is orthogonal, forcing an invertible coordinate block."""
    out = cs.copy()
    for p, q in combinations(BASIS, 2):
        ip = sum(a * b for a, b in zip(BASIS[p], BASIS[q]))
        out.add(_indep(p, q) if ip == 0 else _dep(p, q), "I.vii")
    return out


def encode(t: Trace, semidefinite_guards: bool = False) -> ConstraintSet:
    """The full set: families I.i to I.vi, plus I.vii on request."""
    cs = add_vanishing_constraints(encode_trace(t), t.outputs)
    return add_semidefinite_guards(cs) if semidefinite_guards else cs


# ------------------------------------------------------------------ file I/O

def format_constraint_set(cs: ConstraintSet, header: str = "") -> str:
    order = cs.ground.order()
    lines = [header.rstrip("\n")] if header else []
    lines.append(cs.ground.header())
    for e in cs.ordered():
        lines.append(f"{e.constraint.format(order)} # origin={','.join(e.origins)}")
    return "\n".join(lines) + "\n"


_GROUND_RE = re.compile(r"^P=\(([^()]*)\)\s+L=\(([^()]*)\)\s+E=\(([^()]*)\)$")
_ORIGIN_RE = re.compile(r"origin=([\w.,]+)")


def read_constraint_set(text: str) -> ConstraintSet:
    """Parse a constraint-set file; comments other than ``origin=`` tags are ignored."""
    cs = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body, _, comment = raw.partition("#")
        body = body.strip()
        if not body:
            continue
        if cs is None:
            if not body.startswith("ground:"):
                raise ParseError("constraint file must start with 'ground:'", lineno)
            rest = body[len("ground:"):].strip()
            m = _GROUND_RE.match(rest)
            try:
                if m:
                    ground = GroundSet(*(tuple(g.split()) for g in m.groups()))
                else:
                    ground = GroundSet.plain(rest.split())
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            cs = ConstraintSet(ground)
            continue
        try:
            c = parse_constraint(body)
        except ParseError as exc:
            raise ParseError(str(exc), lineno) from None
        om = _ORIGIN_RE.search(comment)
        origins = om.group(1).split(",") if om else ["input"]
        try:
            for o in origins:
                cs.add(c, o if o in ORIGINS else "input")
        except ValueError as exc:
            if isinstance(exc, ConstraintConflict):
                raise
            raise ParseError(str(exc), lineno) from None
    if cs is None:
        raise ParseError("empty constraint file")
    return cs
