"""Acceptance criteria, one test each.

Run with pytest (a PASS/FAIL line per criterion is printed in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import functools
import os
import sys
import time
import traceback
from fractions import Fraction as F
from itertools import combinations

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from gstaudt.cicore import (  # noqa: E402
    CIConstraint,
    CIStatement,
    SymMatrix,
    all_statements,
    almost_principal_minor,
    check_constraints,
    ci_holds_semidefinite,
    is_diagonally_spanning,
    is_positive_definite,
    is_positive_semidefinite,
    parse_statement,
    principal_minor,
    realized_structure,
    schur_value,
)
from gstaudt.demos import ILLDEFINED, SIMECEK_85, SIMECEK_85_STRUCTURE  # noqa: E402
from gstaudt.encoder import ConstraintSet, GroundSet, encode  # noqa: E402
from gstaudt.errors import InconsistentInterpretation  # noqa: E402
from gstaudt.poly import (  # noqa: E402
    PolyConstraint,
    Polynomial,
    atomize,
    eliminate_inequalities,
    lift_assignment,
    project_assignment,
)
from gstaudt.projective import build_trace  # noqa: E402
from gstaudt.reduction import (  # noqa: E402
    cubic_bound_constant,
    evaluate_minor_chain,
    gci_to_system,
    minor_equations,
)
from gstaudt.poly import symbol_count  # noqa: E402
from gstaudt.scalar import QuadraticNumber  # noqa: E402
from gstaudt.witness import WitnessConfig, build_model, extract_solution  # noqa: E402

from oracles import laplace_det, rand_principally_regular, rand_rational, rand_symmetric, seeded  # noqa: E402
from test_poly import rand_poly  # noqa: E402
from test_projective import table_mismatches  # noqa: E402

RESULTS = {}


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                RESULTS[number] = (title, False, f"{type(exc).__name__}: {exc}".splitlines()[0])
                raise
            elapsed = time.perf_counter() - start
            RESULTS[number] = (title, True, f"{elapsed:.2f}s" + (f", {detail}" if detail else ""))
        return run
    return wrap


def summary_lines():
    lines = []
    for number in sorted(RESULTS):
        title, ok, detail = RESULTS[number]
        lines.append(f"AC{number} {'PASS' if ok else 'FAIL'}  {title} ({detail})")
    return lines


@criterion(1, "framework and gadget coordinate tables")
def test_ac1_coordinate_tables():
    start = time.perf_counter()
    bad = table_mismatches()
    assert bad == []
    assert time.perf_counter() - start < 1


@criterion(2, "Simecek 85 reproduction")
def test_ac2_simecek():
    start = time.perf_counter()
    S = SIMECEK_85
    assert is_positive_semidefinite(S)
    vanishing = {"".join(K) for r in range(1, 5) for K in combinations(S.labels, r)
                 if principal_minor(S, K) == 0}
    assert vanishing == {"123", "1234"}
    realized = realized_structure(S, "semidefinite")
    assert realized == {parse_statement(s) for s in SIMECEK_85_STRUCTURE}
    assert time.perf_counter() - start < 5


@criterion(3, "ill-defined semidefinite example")
def test_ac3_illdefined():
    S = ILLDEFINED
    assert [principal_minor(S, K) for K in ("xyz", "xy", "yz", "xz")] == [0, 2, 2, 0]
    assert almost_principal_minor(S, "i", "j", "xy") == 0
    assert almost_principal_minor(S, "i", "j", "yz") == 2
    with pytest.raises(InconsistentInterpretation):
        ci_holds_semidefinite(S, parse_statement("(i,j|x y z)"), mode="strict")
    assert not is_diagonally_spanning(S)


@criterion(4, "sqrt(2) witness and rational failures")
def test_ac4_sqrt2():
    start = time.perf_counter()
    t = build_trace(atomize([Polynomial.var("t") ** 2 - 2]))
    cs = encode(t)
    S = build_model(t, {"t": QuadraticNumber(0, 1, 2)})
    assert is_positive_definite(S)
    assert check_constraints(S, cs).ok
    vanishing = [c for c in cs if cs.origin_of(c) == ["I.vi"]]
    rng = seeded(400)
    for _ in range(20):
        value = rand_rational(rng, -50, 50, 30)
        report = check_constraints(build_model(t, {"t": value}), cs)
        assert [v.constraint for v in report.failures] == vanishing, value
    elapsed = time.perf_counter() - start
    assert elapsed < 10
    return f"{len(cs)} constraints"


@criterion(5, "evaluation scaling law")
def test_ac5_scaling():
    rng = seeded(500)
    names = ("t", "u")
    for _ in range(100):
        f = rand_poly(rng, names, 3, 2, 4)
        trace = build_trace(atomize([f], inputs=names))
        point = {v: rand_rational(rng) for v in names}
        sx = rand_rational(rng) or F(2)
        sy = rand_rational(rng) or F(3)
        B = [[F(rng.randint(1, 6), rng.randint(1, 3)) if i == j else 0 for j in range(3)]
             for i in range(3)]
        cfg = WitnessConfig(sx=sx, sy=sy, form=B)
        S = build_model(trace, {v: sx * x for v, x in point.items()}, cfg)
        sol = extract_solution(S, trace, verify=False)
        assert sol.fx == [sx * f.evaluate(point)]
        assert sol.consistent


@criterion(6, "Schur identity for almost-principal minors")
def test_ac6_schur():
    rng = seeded(600)
    count = 0
    for k in range(50):
        n = 2 + k % 5
        S = SymMatrix([f"a{i}" for i in range(n)], rand_principally_regular(rng, n))
        for st in all_statements(S.labels):
            assert almost_principal_minor(S, st.i, st.j, st.K) == \
                principal_minor(S, st.K) * schur_value(S, st.i, st.j, st.K)
            count += 1
    return f"{count} statements"


@criterion(7, "solution roundtrip through the model")
def test_ac7_roundtrip():
    rng = seeded(700)
    names = ("t", "u")
    for k in range(50):
        if k % 10 == 0:
            f = rand_poly(rng, names, 2, 2, 3)
            trace = build_trace(atomize([f], inputs=names))
        a = {v: rand_rational(rng) for v in names}
        sol = extract_solution(build_model(trace, a), trace)
        assert sol.inputs == a and sol.candidate == a


def _ladder_system(n):
    labels = [f"a{k}" for k in range(n)]
    cs = ConstraintSet(GroundSet.plain(labels))
    for i in range(n - 1):
        K = frozenset(labels[:i] + labels[i + 2:])
        cs.add(CIConstraint(CIStatement(labels[i], labels[i + 1], K), i % 2 == 0), "input")
    return cs


@criterion(8, "reduction size and minor chains")
def test_ac8_reduction():
    generic = lambda a, b: Polynomial.var(f"s{min(a, b)}_{max(a, b)}")
    constants = {}
    for n in range(3, 9):
        idx = list(range(n))
        enc = minor_equations(idx, idx, generic, "m")
        chain = (sum(symbol_count(p) + 2 for p in enc.equations) if enc.equations
                 else symbol_count(enc.value) + 2)
        assert chain <= 4 * n ** 3
        cs = _ladder_system(n)
        for mode, eco in (("principally-regular", True), ("positive-definite", False)):
            gs = gci_to_system(cs, mode, economical=eco)
            C = cubic_bound_constant(gs)
            assert gs.symbol_count() <= 4 * gs.n_minors * n ** 3
            constants[n] = max(constants.get(n, 0), C)

    rng = seeded(800)
    for _ in range(30):
        n = rng.randint(1, 6)
        M = rand_symmetric(rng, n)
        # the chain divides by leading minors, which side conditions keep nonzero
        while not all(laplace_det([r[:m] for r in M[:m]]) for m in range(1, n)):
            M = rand_symmetric(rng, n)
        idx = list(range(n))
        values = {f"s{i}_{j}": M[i][j] for i in range(n) for j in range(i, n)}
        assert evaluate_minor_chain(minor_equations(idx, idx, generic, "m"), values) == laplace_det(M)
    return "C = " + " ".join(f"{n}:{float(c):.2f}" for n, c in constants.items())


def _shifted(rng, rel, p, point):
    # shift p by an integer so the slack is an exact square at the sample point
    v = p.evaluate(point)
    k = rng.randint(1, 4)
    target = {"=": 0, "!=": rng.choice([-k, k]), ">": k * k, ">=": rng.choice([0, k * k]),
              "<": -k * k, "<=": rng.choice([0, -k * k])}[rel]
    return p + int(target - v)


@criterion(9, "inequality gadgets lift and project")
def test_ac9_gadgets():
    rng = seeded(900)
    rels = ["=", "!=", ">", ">=", "<", "<="]
    names = ("t", "u")
    for _ in range(20):
        point = {v: F(rng.randint(-5, 5)) for v in names}
        cs = [PolyConstraint(_shifted(rng, rel, rand_poly(rng, names, 3, 2, 5), point), rel)
              for rel in rng.sample(rels, rng.randint(2, 6))]
        assert all(c.holds(point) for c in cs)
        eqs = eliminate_inequalities(cs)
        k = 0
        for c, e in zip(cs, eqs):
            if c.rel == "=":
                assert e == c.lhs
                continue
            k += 1
            y = Polynomial.var(f"_y{k}")
            f = -c.lhs if c.rel in ("<", "<=") else c.lhs
            expected = {"!=": y * f - 1, ">": y * y * f - 1, "<": y * y * f - 1,
                        ">=": f - y * y, "<=": f - y * y}[c.rel]
            assert e == expected
        lifted = lift_assignment(cs, point)
        assert all(e.evaluate(lifted) == 0 for e in eqs)
        projected = project_assignment(lifted)
        assert projected == point and all(c.holds(projected) for c in cs)


CRITERIA = [test_ac1_coordinate_tables, test_ac2_simecek, test_ac3_illdefined, test_ac4_sqrt2,
            test_ac5_scaling, test_ac6_schur, test_ac7_roundtrip, test_ac8_reduction,
            test_ac9_gadgets]


if __name__ == "__main__":
    for fn in CRITERIA:
        try:
            fn()
        except Exception:
            traceback.print_exc()
    for line in summary_lines():
        print(line)
    sys.exit(0 if all(ok for _, ok, _ in RESULTS.values()) else 1)
