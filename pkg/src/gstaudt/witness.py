"""Positive-definite models from solutions, and solutions read back from models.

Given input values, every point and line of a trace gets concrete coordinates
(see :func:`gstaudt.projective.evaluate_trace`).  The model matrix has the
bilinear form ``B`` on the coordinate block, the normalized coordinate rows on
``P x E`` and ``L x E``, and ``c_a^T B^-1 c_b`` between objects, which makes
every ``(ab|xyz)`` hold.  The diagonal is then raised until the whole matrix is
positive definite (or, without an order, principally regular).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .cicore import (
    SymMatrix,
    check_constraints,
    is_positive_definite,
    is_principally_regular,
)
from .encoder import encode_trace
from .errors import DegenerateEvaluation, NotAModel, NotPositiveDefinite
from .projective import COORDS, Trace, evaluate_trace, inverse3, normalize_form
from .scalar import extension_of, format_scalar, to_scalar

MAX_ESCALATIONS = 16


@dataclass
class WitnessConfig:
    sx: object = 1
    sy: object = 1
    form: object = None  # 3x3 symmetric matrix; None means the identity
    policy: str = "dominance"  # or "generic-escalation"
    semidefinite_guards: bool = False

    def __post_init__(self):
        self.sx, self.sy = to_scalar(self.sx), to_scalar(self.sy)
        if self.sx == 0 or self.sy == 0:
            raise ValueError("scalings must be nonzero")
        if self.policy not in ("dominance", "generic-escalation"):
            raise ValueError(f"unknown diagonal policy {self.policy!r}")
        self.B = normalize_form(self.form)
        self.Binv = inverse3(self.B)  # raises on a singular form
        diagonal = all(self.B[i][j] == 0 for i in range(3) for j in range(3) if i != j)
        if self.semidefinite_guards and not diagonal:
            raise ValueError("semidefinite guards need a diagonal form")


def _apply(Binv, v):
    return tuple(sum((Binv[i][j] * v[j] for j in range(3) if v[j]), Fraction(0)) for i in range(3))


def _dot(u, w):
    return sum((x * y for x, y in zip(u, w) if x and y), Fraction(0))


def _bilinear(u, Binv, v):
    return _dot(u, _apply(Binv, v))


def _normalized_rows(t: Trace, vals: dict) -> dict:
    rows = {}
    for a in t.objects:
        vec = vals[a]
        c = vec[COORDS.index(t.certs[a])]
        if c == 0:
            raise DegenerateEvaluation(f"certified coordinate {t.certs[a]} of {a} vanishes")
        rows[a] = tuple(x / c for x in vec)
    return rows


def _assemble(t: Trace, rows: dict, cfg: WitnessConfig, diag: Mapping[str, object]) -> SymMatrix:
    objs = t.objects
    labels = list(objs) + list(COORDS)
    n, m = len(labels), len(objs)
    M = [[Fraction(0)] * n for _ in range(n)]
    images = [_apply(cfg.Binv, rows[a]) for a in objs]
    for i, a in enumerate(objs):
        for j in range(i + 1, m):
            M[i][j] = M[j][i] = _dot(rows[a], images[j])
        M[i][i] = diag[a]
        for k in range(3):
            M[i][m + k] = M[m + k][i] = rows[a][k]
    for k in range(3):
        for l in range(3):
            M[m + k][m + l] = cfg.B[k][l]
    return SymMatrix(labels, M)


def schur_complement_pd(S: SymMatrix, cfg: WitnessConfig) -> bool:
    """Positive definiteness through the coordinate block (Haynsworth inertia).

    ``S`` is positive definite iff ``B`` is and so is ``S_PP - S_PE B^-1 S_EP``,
    which is recomputed here from the entries of ``S``.
    """
    m = S.n - 3
    if tuple(S.labels[m:]) != COORDS:
        raise ValueError("the coordinate labels must come last")
    if not is_positive_definite(SymMatrix(COORDS, cfg.B)):
        return False
    rows = [S.rows[i][m:] for i in range(m)]
    images = [_apply(cfg.Binv, r) for r in rows]
    T = [[S.rows[i][j] - _dot(rows[i], images[j]) for j in range(m)] for i in range(m)]
    return is_positive_definite(SymMatrix(S.labels[:m], T))


def build_model(t: Trace, assign: Mapping[str, object], cfg: WitnessConfig | None = None) -> SymMatrix:
    """A model of the trace constraints for the given input coordinates.

    With the ``dominance`` policy the block between objects is the Gram part
    ``c_a^T B^-1 c_b`` plus the identity, so the Schur complement against the
    coordinate block is exactly the identity: the result is positive definite
    precisely when ``B`` is.
    """
    cfg = cfg or WitnessConfig()
    vals = evaluate_trace(t, assign, cfg.B, cfg.sx, cfg.sy)
    rows = _normalized_rows(t, vals)
    gram = {a: _bilinear(rows[a], cfg.Binv, rows[a]) for a in t.objects}

    if cfg.policy == "dominance":
        if not is_positive_definite(SymMatrix(COORDS, cfg.B)):
            raise NotPositiveDefinite("the form B is not positive definite")
        # Schur complement off-diagonals vanish, so 1 + sum |offdiag| is just 1
        S = _assemble(t, rows, cfg, {a: gram[a] + 1 for a in t.objects})
        if not schur_complement_pd(S, cfg):
            raise NotPositiveDefinite("dominance policy did not produce a positive-definite matrix")
        return S

    M = 2
    for _ in range(MAX_ESCALATIONS):
        diag = {a: gram[a] + Fraction(M) ** (k + 1) for k, a in enumerate(t.objects)}
        S = _assemble(t, rows, cfg, diag)
        if is_principally_regular(S):
            return S
        M *= 2
    raise NotPositiveDefinite(f"no principally regular diagonal found after {MAX_ESCALATIONS} doublings")


@dataclass
class Solution:
    sx: object
    sy: object
    inputs: dict        # variable -> raw x-coordinate read from the matrix
    candidate: dict     # variable -> coordinate / s_x
    fx: list            # output x-coordinates
    residuals: list     # f_i(candidate)

    @property
    def consistent(self) -> bool:
        """The scaling law f^x = s_x * f(t / s_x)."""
        return all(r * self.sx == f for r, f in zip(self.residuals, self.fx))

    @property
    def is_solution(self) -> bool:
        return all(r == 0 for r in self.residuals)


def _affine(S: SymMatrix, label: str, coord: str):
    z = S[label, "z"]
    if z == 0:
        raise NotAModel(f"{label} has vanishing z-coordinate")
    return S[label, coord] / z


def extract_solution(S: SymMatrix, t: Trace, semantics: str = "regular", verify: bool = True) -> Solution:
    """Read the scalings, input values and output values off a model of the trace constraints."""
    if verify:
        report = check_constraints(S, encode_trace(t), semantics)
        if not report.ok:
            bad = report.failures[0].constraint if report.failures else None
            what = f"first failing constraint {bad}" if bad else report.side_condition + " fails"
            raise NotAModel(f"matrix is not a model of the trace constraints: {what}")
    sx, sy = _affine(S, "1", "x"), _affine(S, "1", "y")
    inputs = {v: _affine(S, lab, "x") for v, lab in zip(t.input_vars(), t.inputs)}
    candidate = {v: x / sx for v, x in inputs.items()}
    fx = [_affine(S, f, "x") for f in t.outputs]
    residuals = t.system.output_values(candidate) if t.system is not None else []
    return Solution(sx, sy, inputs, candidate, fx, list(residuals))


def format_report(sol: Solution) -> str:
    """Tab-separated table of scalings, inputs and residuals."""
    lines = ["quantity\tname\tvalue",
             f"scale\ts_x\t{format_scalar(sol.sx)}",
             f"scale\ts_y\t{format_scalar(sol.sy)}"]
    for v, x in sol.inputs.items():
        lines.append(f"input\t{v}\t{format_scalar(x)}")
    for v, x in sol.candidate.items():
        lines.append(f"candidate\t{v}\t{format_scalar(x)}")
    for k, (f, r) in enumerate(zip(sol.fx, sol.residuals), start=1):
        lines.append(f"output_x\tf{k}\t{format_scalar(f)}")
        lines.append(f"residual\tf{k}\t{format_scalar(r)}")
    lines.append(f"consistent\tscaling\t{'yes' if sol.consistent else 'no'}")
    return "\n".join(lines) + "\n"


def witness_degree(S: SymMatrix) -> int:
    """Degree over Q of the field generated by the entries (1 or 2)."""
    return 1 if extension_of(x for r in S.rows for x in r) == 1 else 2

