"""Worked examples that can be replayed from the command line."""

from __future__ import annotations

from fractions import Fraction as F
from itertools import combinations

from .cicore import (
    SymMatrix,
    almost_principal_minor,
    check_constraints,
    ci_holds_semidefinite,
    format_matrix,
    is_diagonally_spanning,
    is_positive_definite,
    is_positive_semidefinite,
    parse_statement,
    principal_minor,
    realized_structure,
)
from .encoder import encode
from .errors import InconsistentInterpretation
from .poly import atomize, parse_system
from .projective import build_trace
from .scalar import QuadraticNumber, format_scalar
from .witness import build_model, extract_solution

SIMECEK_85 = SymMatrix.from_upper("1234", [
    1, F(-1, 17), F(-49, 51), F(-7, 17),
    1, F(1, 3), F(1, 7),
    1, F(3, 7),
    1,
])
SIMECEK_85_STRUCTURE = ["(1,2|4)", "(1,4|3)", "(1,4|2 3)", "(2,4|3)", "(2,4|1 3)", "(3,4|1 2)"]

ILLDEFINED = SymMatrix.from_upper("ijxyz", [
    1, 1, -1, 0, 0,
    -1, -1, 0, 0,
    1, 0, 1,
    2, 0,
    1,
])


def demo_sqrt2(out) -> bool:
    """t^2 - 2 = 0: a rational value fails only at the vanishing constraint, sqrt(2) passes."""
    system = parse_system("t^2 - 2 = 0")
    trace = build_trace(atomize([c.lhs for c in system]))
    cs = encode(trace)
    out.write(f"system: t^2 - 2 = 0\ntrace: {len(trace.points)} points, {len(trace.lines)} lines, "
              f"{len(trace.steps)} steps\nconstraints: {len(cs)}\n")
    ok = True
    for value in (F(3, 2), QuadraticNumber(0, 1, 2)):
        S = build_model(trace, {"t": value})
        report = check_constraints(S, cs)
        failed = [str(v.constraint) for v in report.failures]
        sol = extract_solution(S, trace, verify=False)
        out.write(f"\nt = {format_scalar(value)}: positive definite = {is_positive_definite(S)}, "
                  f"residual = {format_scalar(sol.residuals[0])}\n")
        out.write(f"  failing constraints: {', '.join(failed) if failed else 'none'}\n")
        expect = [] if isinstance(value, QuadraticNumber) else [f"({trace.outputs[0]},x|)"]
        ok = ok and failed == expect
    out.write(f"\nresult: {'as expected' if ok else 'UNEXPECTED'}\n")
    return ok


def demo_simecek85(out) -> bool:
    S = SIMECEK_85
    out.write(format_matrix(S))
    psd = is_positive_semidefinite(S)
    vanishing = ["".join(K) for r in range(1, 5) for K in combinations(S.labels, r)
                 if principal_minor(S, K) == 0]
    realized = realized_structure(S, "semidefinite")
    expected = {parse_statement(s) for s in SIMECEK_85_STRUCTURE}
    out.write(f"positive semidefinite: {psd}\n")
    out.write(f"vanishing principal minors: {' '.join(vanishing)}\n")
    out.write("realized structure: " + " ".join(sorted(str(s) for s in realized)) + "\n")
    ok = psd and vanishing == ["123", "1234"] and realized == expected
    out.write(f"matches the listed structure: {realized == expected}\n")
    out.write(f"result: {'as expected' if ok else 'UNEXPECTED'}\n")
    return ok


def demo_illdefined(out) -> bool:
    S = ILLDEFINED
    out.write(format_matrix(S))
    for K in ("xyz", "xy", "yz", "xz"):
        out.write(f"pr({K}) = {format_scalar(principal_minor(S, K))}\n")
    for K in ("xy", "yz"):
        out.write(f"apr(ij|{K}) = {format_scalar(almost_principal_minor(S, 'i', 'j', K))}\n")
    span = is_diagonally_spanning(S)
    out.write(f"diagonally spanning: {span}\n")
    raised = False
    try:
        ci_holds_semidefinite(S, parse_statement("(i,j|x y z)"), mode="strict")
    except InconsistentInterpretation as exc:
        raised = True
        out.write(f"strict interpretation: {exc}\n")
    ok = raised and not span
    out.write(f"result: {'as expected' if ok else 'UNEXPECTED'}\n")
    return ok


DEMOS = {"sqrt2": demo_sqrt2, "simecek85": demo_simecek85, "illdefined": demo_illdefined}
