"""Command-line interface: ``gstaudt compile|witness|check|reduce|demo``.

Exit codes: 0 success, 1 check failed, 2 malformed input,
3 unmet precondition, 4 anything else.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys
from pathlib import Path

from . import __version__
from .cicore import check_constraints, format_matrix, read_matrix
from .demos import DEMOS
from .encoder import encode, format_constraint_set, read_constraint_set
from .errors import (
    ConstraintConflict,
    DegenerateEvaluation,
    GstaudtError,
    IncompatibleExtension,
    NotASquare,
    NotPositiveDefinite,
    ParseError,
    PreconditionError,
)
from .poly import atomize, eliminate_inequalities, lift_assignment, parse_system
from .projective import build_trace
from .reduction import format_generic_system, gci_to_system
from .scalar import parse_scalar
from .witness import WitnessConfig, build_model, extract_solution, format_report

log = logging.getLogger("gstaudt")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_PARSE, EXIT_PRECONDITION, EXIT_INTERNAL = 0, 1, 2, 3, 4


def _header(command: str, *texts: str) -> str:
    h = hashlib.sha256()
    for t in texts:
        h.update(t.encode())
    return f"# gstaudt {__version__} {command}\n# input sha256 {h.hexdigest()}\n"


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _trace_for(text: str):
    system = parse_system(text)
    eqs = eliminate_inequalities(system)
    return system, build_trace(atomize(eqs))


def parse_assignment(text: str) -> dict:
    """Lines ``name = scalar``; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, eq, value = line.partition("=")
        if not eq or not name.strip():
            raise ParseError("expected 'name = value'", lineno)
        try:
            out[name.strip()] = parse_scalar(value)
        except ParseError as exc:
            raise ParseError(str(exc), lineno) from None
    return out


def parse_form(text: str):
    """Three rows separated by ';', entries by whitespace or commas."""
    rows = [r.replace(",", " ").split() for r in text.split(";")]
    if len(rows) != 3 or any(len(r) != 3 for r in rows):
        raise ParseError(f"form must be 3x3, got {text!r}")
    return [[parse_scalar(x) for x in r] for r in rows]


def cmd_compile(args) -> int:
    text = _read(args.system)
    _, trace = _trace_for(text)
    cs = encode(trace, args.semidefinite_guards)
    log.info("%d points, %d lines, %d constraints", len(trace.points), len(trace.lines), len(cs))
    _write(args.out, format_constraint_set(cs, _header("compile", text)))
    return EXIT_OK


def cmd_witness(args) -> int:
    text, atext = _read(args.system), _read(args.assignment)
    system, trace = _trace_for(text)
    values = parse_assignment(atext)
    missing = [v for v in trace.input_vars() if not v.startswith("_") and v not in values]
    if missing:
        raise PreconditionError(f"assignment misses {', '.join(missing)}")
    try:
        full = lift_assignment(system, values)
    except ValueError as exc:
        if isinstance(exc, NotASquare):
            raise
        raise PreconditionError(str(exc)) from None
    cfg = WitnessConfig(sx=parse_scalar(args.sx), sy=parse_scalar(args.sy),
                        form=parse_form(args.form) if args.form else None,
                        policy=args.policy, semidefinite_guards=args.semidefinite_guards)
    coords = {v: cfg.sx * full[v] for v in trace.input_vars()}
    S = build_model(trace, coords, cfg)
    _write(args.out, format_matrix(S, _header("witness", text, atext)))
    if args.report:
        _write(args.report, format_report(extract_solution(S, trace, verify=False)))
    return EXIT_OK


def cmd_check(args) -> int:
    mtext, ctext = _read(args.matrix), _read(args.constraints)
    S = read_matrix(mtext)
    cs = read_constraint_set(ctext)
    report = check_constraints(S, cs.constraints, args.semantics, args.mode,
                               side_condition=not args.no_side_condition)
    sys.stdout.write(_header("check", mtext, ctext) + report.format(cs.ground.order()))
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def cmd_reduce(args) -> int:
    text = _read(args.constraints)
    cs = read_constraint_set(text)
    gs = gci_to_system(cs, args.mode, economical=args.economical, max_n=args.max_n)
    log.info("%d minors, %d symbols", gs.n_minors, gs.symbol_count())
    _write(args.out, format_generic_system(gs, _header("reduce", text)))
    return EXIT_OK


def cmd_demo(args) -> int:
    return EXIT_OK if DEMOS[args.name](sys.stdout) else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gstaudt", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"gstaudt {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="polynomial system -> CI constraint set")
    c.add_argument("system")
    c.add_argument("-o", "--out")
    c.add_argument("--semidefinite-guards", action="store_true")
    c.set_defaults(func=cmd_compile)

    w = sub.add_parser("witness", help="solution -> positive-definite model matrix")
    w.add_argument("system")
    w.add_argument("assignment")
    w.add_argument("-o", "--out")
    w.add_argument("--sx", default="1")
    w.add_argument("--sy", default="1")
    w.add_argument("--form", help="bilinear form as 'a b c; d e f; g h i'")
    w.add_argument("--policy", choices=("dominance", "generic-escalation"), default="dominance")
    w.add_argument("--semidefinite-guards", action="store_true")
    w.add_argument("--report", help="write the tab-separated solution report here")
    w.set_defaults(func=cmd_witness)

    k = sub.add_parser("check", help="matrix against a constraint set")
    k.add_argument("matrix")
    k.add_argument("constraints")
    k.add_argument("--semantics", choices=("regular", "semidefinite"), default="regular")
    k.add_argument("--mode", choices=("first", "strict"), default="first")
    k.add_argument("--no-side-condition", action="store_true",
                   help="skip the principal regularity / semidefiniteness check")
    k.set_defaults(func=cmd_check)

    r = sub.add_parser("reduce", help="CI constraint set -> polynomial system")
    r.add_argument("constraints")
    r.add_argument("-o", "--out")
    r.add_argument("--mode", choices=("principally-regular", "positive-definite"),
                   default="principally-regular")
    r.add_argument("--economical", action="store_true",
                   help="only the principal minors the constraints need")
    r.add_argument("--max-n", type=int, default=None)
    r.set_defaults(func=cmd_reduce)

    d = sub.add_parser("demo", help="replay a worked example")
    d.add_argument("name", choices=sorted(DEMOS))
    d.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, ConstraintConflict) as exc:
        log.error("%s", exc)
        return EXIT_PARSE
    except (PreconditionError, DegenerateEvaluation, NotPositiveDefinite, NotASquare,
            IncompatibleExtension, OSError) as exc:
        log.error("%s", exc)
        return EXIT_PRECONDITION
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_INTERNAL if isinstance(exc, GstaudtError) else EXIT_PRECONDITION
    except Exception:
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
