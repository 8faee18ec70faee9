"""Projective-plane kernel and the von Staudt ruler gadgets.

A :class:`Trace` is a certified ruler construction: the standard basis, the
seven framework objects, one indeterminate point per input variable, and the
join/meet steps of the addition and multiplication gadgets.  Every object is
also evaluated symbolically (coordinates are integer polynomials in the
indeterminates) so that each step carries a coordinate which is a nonzero
constant, hence nonzero under every instantiation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, NamedTuple

from .errors import CertificateError, DegenerateCross, DegenerateEvaluation
from .poly import AtomicSystem, Polynomial, Prod, Sum, Unit
from .scalar import to_scalar

COORDS = ("x", "y", "z")


class HomVec(NamedTuple):
    x: object
    y: object
    z: object


def cross(u, v) -> HomVec:
    """Join of two points or meet of two lines in homogeneous coordinates."""
    r = HomVec(u[1] * v[2] - u[2] * v[1],
               u[2] * v[0] - u[0] * v[2],
               u[0] * v[1] - u[1] * v[0])
    if all(c == 0 for c in r):
        raise DegenerateCross(f"cross product of proportional vectors {tuple(u)} and {tuple(v)}")
    return r


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def proportional(u, v) -> bool:
    """Projective equality: both nonzero and all 2x2 minors vanish."""
    if all(c == 0 for c in u) or all(c == 0 for c in v):
        return False
    return (u[1] * v[2] == u[2] * v[1] and u[2] * v[0] == u[0] * v[2]
            and u[0] * v[1] == u[1] * v[0])


BASIS = {
    "inf_x": (1, 0, 0),
    "inf_y": (0, 1, 0),
    "0": (0, 0, 1),
    "1": (1, 1, 1),
}
# certified coordinates of the basis points (the nonzero one for the points at infinity)
BASIS_CERT = {"inf_x": "x", "inf_y": "y", "0": "z", "1": "z"}

FRAMEWORK = (
    ("l_x", "join", "0", "inf_x"),
    ("l_y", "join", "0", "inf_y"),
    ("l_inf", "join", "inf_x", "inf_y"),
    ("l_1x", "join", "1", "inf_x"),
    ("l_1y", "join", "1", "inf_y"),
    ("1_x", "meet", "l_1y", "l_x"),
    ("1_y", "meet", "l_1x", "l_y"),
)


@dataclass(frozen=True)
class Step:
    kind: str          # "join" or "meet"
    a: str
    b: str
    result: str
    result_kind: str   # "point" or "line"
    cert: str          # coordinate of the result that is a nonzero constant
    gadget: str = ""
    closes: bool = False  # the result label already existed: the step is an incidence check


def var_label(var: str) -> str:
    return f"v.{var}"


@dataclass
class Trace:
    """A ruler construction.  Built incrementally, then treated as immutable."""

    basis: tuple = tuple(BASIS)
    framework: tuple = tuple(name for name, *_ in FRAMEWORK)
    inputs: list = field(default_factory=list)
    free: dict = field(default_factory=dict)  # label -> (minuend label, subtrahend label)
    steps: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    kinds: dict = field(default_factory=dict)
    certs: dict = field(default_factory=dict)
    symbolic: dict = field(default_factory=dict)
    var_labels: dict = field(default_factory=dict)
    system: AtomicSystem | None = None
    _counters: dict = field(default_factory=dict, repr=False)

    @property
    def points(self) -> list[str]:
        return [k for k, v in self.kinds.items() if v == "point"]

    @property
    def lines(self) -> list[str]:
        return [k for k, v in self.kinds.items() if v == "line"]

    @property
    def objects(self) -> list[str]:
        """Ground order of P then L."""
        return self.points + self.lines

    def input_vars(self) -> list[str]:
        inv = {lab: var for var, lab in self.var_labels.items()}
        return [inv[lab] for lab in self.inputs]

    def _declare(self, label, kind, vec, cert):
        if label in self.kinds:
            raise ValueError(f"label {label!r} defined twice")
        self.kinds[label] = kind
        self.symbolic[label] = HomVec(*vec)
        self.certs[label] = cert

    def _gadget_name(self, kind: str) -> str:
        self._counters[kind] = self._counters.get(kind, 0) + 1
        return f"{kind}{self._counters[kind]}"


def choose_certificate(vec) -> str:
    """A coordinate whose polynomial is a nonzero constant (preferring z, then x, then y)."""
    for name in ("z", "x", "y"):
        c = vec[COORDS.index(name)]
        if c != 0 and (not isinstance(c, Polynomial) or c.is_constant()):
            return name
    raise CertificateError(f"no coordinate of {tuple(map(str, vec))} is a nonzero constant")


def _apply(t: Trace, kind: str, a: str, b: str, result: str, gadget: str) -> str:
    want = "point" if kind == "join" else "line"
    for op in (a, b):
        if t.kinds.get(op) != want:
            raise ValueError(f"{kind} needs two {want}s, got {op!r}")
    vec = cross(t.symbolic[a], t.symbolic[b])
    # a constant coordinate in the cross product also proves a != b everywhere
    cert = choose_certificate(vec)
    out_kind = "line" if kind == "join" else "point"
    closes = result in t.kinds
    if closes:
        if t.kinds[result] != out_kind:
            raise ValueError(f"{result!r} is not a {out_kind}")
    else:
        t._declare(result, out_kind, vec, cert)
    t.steps.append(Step(kind, a, b, result, out_kind, cert, gadget, closes))
    return result


def standard_framework() -> Trace:
    t = Trace()
    for label, coords in BASIS.items():
        t._declare(label, "point", tuple(Polynomial.const(c) for c in coords), BASIS_CERT[label])
    for label, kind, a, b in FRAMEWORK:
        _apply(t, kind, a, b, label, "framework")
    return t


def _axis_point(var: str) -> HomVec:
    return HomVec(Polynomial.var(var), Polynomial.const(0), Polynomial.const(1))


def add_input(t: Trace, var: str) -> str:
    label = var_label(var)
    t._declare(label, "point", _axis_point(var), "z")
    t.inputs.append(label)
    t.var_labels[var] = label
    return label


def add_free(t: Trace, var: str, minuend: str, subtrahend: str) -> str:
    """An indeterminate point on the x-axis pinned down later by a closing step."""
    label = var_label(var)
    t._declare(label, "point", _axis_point(var), "z")
    t.free[label] = (minuend, subtrahend)
    t.var_labels[var] = label
    return label


def emit_addition(xl: str, yl: str, t: Trace, result: str | None = None) -> str:
    """Append the seven addition steps for points ``xl`` and ``yl`` on the x-axis."""
    g = t._gadget_name("add")
    result = result or f"{g}.sum"
    _apply(t, "join", "1_y", "inf_x", f"{g}.g", g)
    _apply(t, "join", xl, "inf_y", f"{g}.h", g)
    _apply(t, "meet", f"{g}.g", f"{g}.h", f"{g}.q", g)
    _apply(t, "join", yl, "1_y", f"{g}.j", g)
    _apply(t, "meet", f"{g}.j", "l_inf", f"{g}.inf_j", g)
    _apply(t, "join", f"{g}.q", f"{g}.inf_j", f"{g}.jp", g)
    return _apply(t, "meet", f"{g}.jp", "l_x", result, g)


def emit_multiplication(xl: str, yl: str, t: Trace, result: str | None = None) -> str:
    """Append the eight multiplication steps for points ``xl`` and ``yl`` on the x-axis."""
    g = t._gadget_name("mul")
    result = result or f"{g}.prod"
    _apply(t, "join", "1_x", "1_y", f"{g}.g", g)
    _apply(t, "join", xl, "1_y", f"{g}.h", g)
    _apply(t, "meet", f"{g}.g", "l_inf", f"{g}.inf_g", g)
    _apply(t, "meet", f"{g}.h", "l_inf", f"{g}.inf_h", g)
    _apply(t, "join", f"{g}.inf_g", yl, f"{g}.gp", g)
    _apply(t, "meet", f"{g}.gp", "l_y", f"{g}.q", g)
    _apply(t, "join", f"{g}.q", f"{g}.inf_h", f"{g}.hp", g)
    return _apply(t, "meet", f"{g}.hp", "l_x", result, g)


def build_trace(sys: AtomicSystem) -> Trace:
    t = standard_framework()
    t.system = sys
    for v in sys.inputs:
        add_input(t, v)
    lab = t.var_labels
    for k, atom in enumerate(sys.atoms):
        if isinstance(atom, Unit):
            lab[atom.v] = "1_x"
        elif k in sys.closing:
            add_free(t, atom.a, lab[atom.c], lab[atom.b])
            emit_addition(lab[atom.a], lab[atom.b], t, result=lab[atom.c])
        elif isinstance(atom, Sum):
            lab[atom.c] = var_label(atom.c)
            emit_addition(lab[atom.a], lab[atom.b], t, result=lab[atom.c])
        elif isinstance(atom, Prod):
            lab[atom.c] = var_label(atom.c)
            emit_multiplication(lab[atom.a], lab[atom.b], t, result=lab[atom.c])
    t.outputs = [lab[v] for v in sys.outputs]
    return t


# ------------------------------------------------------------- evaluation

def _identity3():
    return [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]


def det3(m) -> object:
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def inverse3(m):
    d = det3(m)
    if d == 0:
        raise ValueError("bilinear form must be invertible")
    cof = [[m[(j + 1) % 3][(i + 1) % 3] * m[(j + 2) % 3][(i + 2) % 3]
            - m[(j + 1) % 3][(i + 2) % 3] * m[(j + 2) % 3][(i + 1) % 3]
            for j in range(3)] for i in range(3)]
    return [[cof[i][j] / d for j in range(3)] for i in range(3)]


def matvec(m, v) -> HomVec:
    return HomVec(*(m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2] for i in range(3)))


def normalize_form(form):
    if form is None:
        return _identity3()
    B = [[to_scalar(form[i][j]) for j in range(3)] for i in range(3)]
    if any(B[i][j] != B[j][i] for i in range(3) for j in range(3)):
        raise ValueError("bilinear form must be symmetric")
    return B


def evaluate_trace(t: Trace, assign: Mapping[str, object], form=None, sx=1, sy=1) -> dict:
    """Coordinates of every labelled object for concrete input values.

    Incidence is taken with respect to ``<v, w> = v^T B^-1 w``: a join of
    ``p, q`` is ``B (p x q)`` and a meet of ``l, m`` is ``(B^-1 l) x (B^-1 m)``.
    The basis is ``(1:0:0), (0:1:0), (0:0:1), (sx:sy:1)``.
    """
    sx, sy = to_scalar(sx), to_scalar(sy)
    if sx == 0 or sy == 0:
        raise ValueError("scalings must be nonzero")
    B = normalize_form(form)
    plain = form is None or B == _identity3()
    Binv = B if plain else inverse3(B)
    one, zero = Fraction(1), Fraction(0)
    vals = {
        "inf_x": HomVec(one, zero, zero),
        "inf_y": HomVec(zero, one, zero),
        "0": HomVec(zero, zero, one),
        "1": HomVec(sx, sy, one),
    }
    inv = {lab: var for var, lab in t.var_labels.items()}
    for label in t.inputs:
        vals[label] = HomVec(to_scalar(assign[inv[label]]), zero, one)

    def get(label):
        if label not in vals and label in t.free:
            m, s = (get(x) for x in t.free[label])
            vals[label] = HomVec(m[0] / m[2] - s[0] / s[2], zero, one)
        return vals[label]

    for st in t.steps:
        u, v = get(st.a), get(st.b)
        try:
            if st.kind == "join":
                r = cross(u, v) if plain else matvec(B, cross(u, v))
            else:
                r = cross(u, v) if plain else cross(matvec(Binv, u), matvec(Binv, v))
        except DegenerateCross as exc:
            raise DegenerateEvaluation(f"step {st.result} = {st.kind}({st.a},{st.b}): {exc}") from exc
        if st.closes:
            if not proportional(r, vals[st.result]):
                raise DegenerateEvaluation(f"closing step for {st.result} does not close")
        else:
            vals[st.result] = r
    for label in t.free:
        get(label)
    return vals


def format_trace(t: Trace) -> str:
    lines = [
        "basis: " + " ".join(t.basis),
        "inputs: " + " ".join(t.inputs),
        "free: " + " ".join(f"{k}={m}-{s}" for k, (m, s) in t.free.items()),
        "outputs: " + " ".join(t.outputs),
    ]
    for st in t.steps:
        tail = " closes" if st.closes else ""
        lines.append(f"{st.result} = {st.kind}({st.a},{st.b}) cert={st.cert}{tail}")
    return "\n".join(lines) + "\n"
