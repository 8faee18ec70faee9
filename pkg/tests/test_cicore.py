from fractions import Fraction as F
from itertools import combinations

import pytest

from gstaudt.cicore import (
    CIConstraint,
    CIStatement,
    SymMatrix,
    all_statements,
    almost_principal_minor,
    check_constraints,
    ci_holds_regular,
    ci_holds_semidefinite,
    det,
    format_matrix,
    is_diagonally_spanning,
    is_positive_definite,
    is_positive_semidefinite,
    is_principally_regular,
    parse_constraint,
    parse_statement,
    principal_minor,
    rank,
    rank_of,
    read_matrix,
    realized_structure,
    schur_value,
)
from gstaudt.demos import ILLDEFINED, SIMECEK_85, SIMECEK_85_STRUCTURE
from gstaudt.errors import (
    IllDefinedInterpretation,
    InconsistentInterpretation,
    ParseError,
    SingularConditioningBlock,
    SizeGuardExceeded,
    UnknownLabel,
)
from gstaudt.scalar import QuadraticNumber as Q

from oracles import (
    laplace_det,
    minor_rank,
    rand_gram,
    rand_pd,
    rand_principally_regular,
    rand_rational,
    rand_symmetric,
    seeded,
)


def labels(n):
    return [str(k) for k in range(1, n + 1)]


def identity(n):
    return SymMatrix(labels(n), [[int(i == j) for j in range(n)] for i in range(n)])


def test_det_matches_laplace():
    rng = seeded(20)
    for _ in range(60):
        n = rng.randint(0, 6)
        M = [[rand_rational(rng) for _ in range(n)] for _ in range(n)]
        assert det(M) == laplace_det(M)
    for _ in range(20):
        n = rng.randint(1, 4)
        M = [[Q(rand_rational(rng), rand_rational(rng) or 1, 2) for _ in range(n)] for _ in range(n)]
        assert det(M) == laplace_det(M)


def test_det_singular_and_pivoting():
    assert det([[0, 1], [1, 0]]) == -1
    assert det([[1, 2], [2, 4]]) == 0
    assert det([[0, 0, 1], [0, 1, 0], [1, 0, 0]]) == -1


def test_rank_matches_oracle():
    rng = seeded(21)
    for _ in range(40):
        n, r = rng.randint(1, 5), rng.randint(0, 5)
        G = rand_gram(rng, n, r)
        assert rank(G) == minor_rank(G)
        m = rng.randint(1, 4)
        R = [[F(rng.randint(-1, 1)) for _ in range(n)] for _ in range(m)]
        assert rank(R) == minor_rank(R)


def test_symmatrix_validation():
    with pytest.raises(ValueError):
        SymMatrix("ab", [[1, 2], [3, 1]])
    with pytest.raises(ValueError):
        SymMatrix("aa", [[1, 0], [0, 1]])
    with pytest.raises(UnknownLabel):
        principal_minor(identity(3), ["9"])
    with pytest.raises(UnknownLabel):
        almost_principal_minor(identity(3), "1", "7", [])


def test_statements():
    s = CIStatement("a", "b", frozenset("cd"))
    assert s == CIStatement("b", "a", frozenset("dc"))
    assert hash(s) == hash(CIStatement("b", "a", frozenset("cd")))
    assert parse_statement("(a,b|c d)") == s
    assert parse_statement("( a , b | )") == CIStatement("a", "b")
    with pytest.raises(ValueError):
        CIStatement("a", "a")
    with pytest.raises(ValueError):
        CIStatement("a", "b", frozenset("a"))
    c = parse_constraint("!(1,2|3)")
    assert not c.independent and c.polarity == "dependence"
    assert str(c) == "!(1,2|3)"
    for bad in ("(a|b)", "a,b|c", "(a,b)", "(a,a|)"):
        with pytest.raises(ParseError):
            parse_statement(bad)
    assert s.format({"d": 0, "c": 1, "b": 2, "a": 3}) == "(b,a|d c)"


def test_identity_examples():
    I4 = identity(4)
    for r in range(5):
        for K in combinations(I4.labels, r):
            assert principal_minor(I4, K) == 1
    assert almost_principal_minor(I4, "1", "2", ["3"]) == 0
    assert is_positive_definite(I4) and is_diagonally_spanning(I4)
    assert not is_positive_definite(SymMatrix("ab", [[1, 0], [0, -1]]))
    for n in range(2, 6):
        assert realized_structure(identity(n)) == set(all_statements(labels(n)))


def test_simecek_examples():
    S = SIMECEK_85
    assert principal_minor(S, "123") == 0
    assert almost_principal_minor(S, "1", "2", "4") == 0
    assert schur_value(S, "1", "2", "4") == 0
    assert schur_value(S, "1", "2", []) == S["1", "2"]
    assert not is_positive_definite(S)
    assert is_positive_semidefinite(S) and is_diagonally_spanning(S)
    assert ci_holds_semidefinite(S, parse_statement("(3,4|1 2)"))
    want = {parse_statement(s) for s in SIMECEK_85_STRUCTURE}
    assert realized_structure(S, "semidefinite") == want
    assert realized_structure(S, "semidefinite", mode="strict") == want
    # pr(123) = 0 is never a conditioning block on four labels, so regular
    # semantics is defined statement by statement, but S is not principally regular
    assert not is_principally_regular(S)


def test_illdefined_examples():
    S = ILLDEFINED
    assert [principal_minor(S, K) for K in ("xyz", "xy", "yz", "xz")] == [0, 2, 2, 0]
    assert almost_principal_minor(S, "i", "j", "xy") == 0
    assert almost_principal_minor(S, "i", "j", "yz") == 2
    assert not is_diagonally_spanning(S)
    assert not is_positive_semidefinite(S)
    st = parse_statement("(i,j|x y z)")
    with pytest.raises(InconsistentInterpretation):
        ci_holds_semidefinite(S, st, mode="strict")
    with pytest.raises(IllDefinedInterpretation):
        ci_holds_semidefinite(S, st, mode="first")
    with pytest.raises(SingularConditioningBlock):
        ci_holds_regular(S, st)


def test_schur_identity_random():
    rng = seeded(22)
    for _ in range(15):
        n = rng.randint(2, 5)
        S = SymMatrix(labels(n), rand_principally_regular(rng, n))
        for st in all_statements(S.labels):
            assert almost_principal_minor(S, st.i, st.j, st.K) == \
                principal_minor(S, st.K) * schur_value(S, st.i, st.j, st.K)


def test_schur_singular():
    with pytest.raises(SingularConditioningBlock):
        schur_value(ILLDEFINED, "i", "j", "xyz")


def test_psd_oracle_and_l_independence():
    rng = seeded(23)
    for _ in range(20):
        n, r = rng.randint(2, 5), rng.randint(1, 4)
        S = SymMatrix(labels(n), rand_gram(rng, n, r))
        assert is_positive_semidefinite(S)
        assert is_diagonally_spanning(S)
        for st in all_statements(S.labels):
            ci_holds_semidefinite(S, st, mode="strict")  # never raises on PSD input
            assert ci_holds_semidefinite(S, st) == ci_holds_semidefinite(S, st, "strict")


def test_psd_against_minor_oracle():
    rng = seeded(24)
    for _ in range(40):
        n = rng.randint(1, 4)
        M = rand_symmetric(rng, n, -2, 2, 1)
        want = all(laplace_det([[M[i][j] for j in K] for i in K]) >= 0
                   for r in range(1, n + 1) for K in combinations(range(n), r))
        assert is_positive_semidefinite(SymMatrix(labels(n), M)) == want


def test_semantics_agree_on_regular():
    rng = seeded(25)
    for _ in range(10):
        n = rng.randint(2, 5)
        S = SymMatrix(labels(n), rand_principally_regular(rng, n))
        assert is_principally_regular(S)
        for st in all_statements(S.labels):
            assert ci_holds_regular(S, st) == ci_holds_semidefinite(S, st, "strict")


def test_pd_implies_regular_and_psd():
    rng = seeded(26)
    for _ in range(30):
        n = rng.randint(1, 5)
        S = SymMatrix(labels(n), rand_pd(rng, n))
        assert is_positive_definite(S)
        # check the implications by enumeration, bypassing the definiteness shortcut
        assert all(principal_minor(S, K) > 0
                   for r in range(1, n + 1) for K in combinations(S.labels, r))
        assert is_diagonally_spanning(S)
        assert is_principally_regular(S) and is_positive_semidefinite(S)


def test_random_regular_matrix_realizes_nothing():
    S = SymMatrix(labels(4), [[5, 1, 2, 3], [1, 7, 1, 2], [2, 1, 11, 1], [3, 2, 1, 13]])
    assert is_principally_regular(S)
    assert realized_structure(S) == set()


def test_size_guard(monkeypatch):
    S = SymMatrix(labels(4), [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    monkeypatch.setenv("GSTAUDT_MAX_N", "3")
    with pytest.raises(SizeGuardExceeded):
        is_principally_regular(S)
    with pytest.raises(SizeGuardExceeded):
        is_diagonally_spanning(S)
    monkeypatch.setenv("GSTAUDT_MAX_N", "4")
    assert not is_principally_regular(S)
    # positive-definite input needs no enumeration
    monkeypatch.setenv("GSTAUDT_MAX_N", "1")
    assert is_principally_regular(identity(6))


def test_check_constraints_report():
    S = SIMECEK_85
    cs = [parse_constraint(s) for s in SIMECEK_85_STRUCTURE] + [parse_constraint("!(1,3|)")]
    rep = check_constraints(S, cs, "semidefinite")
    assert rep.ok and rep.side_ok
    rep = check_constraints(S, cs, "regular")
    assert not rep.ok and rep.side_ok is False
    rep = check_constraints(S, [parse_constraint("(1,3|)")], "semidefinite")
    assert not rep.ok and len(rep.failures) == 1
    assert "FAIL (1,3|)" in rep.format()
    rep = check_constraints(ILLDEFINED, [parse_constraint("(i,j|x y z)")], "semidefinite",
                            mode="strict", side_condition=False)
    assert not rep.ok and rep.failures[0].error


def test_rank_of():
    assert rank_of(SIMECEK_85, "123") == 2
    assert rank_of(SIMECEK_85, "1234") == 3
    assert rank_of(ILLDEFINED, "xyz") == 2


def test_matrix_file_roundtrip():
    S = SymMatrix("abc", [[1, F(1, 2), Q(0, 1, 2)], [F(1, 2), 2, 0], [Q(0, 1, 2), 0, 3]])
    text = format_matrix(S, "# header")
    assert text.startswith("# header\nlabels: a b c\n")
    assert read_matrix(text) == S
    with pytest.raises(ParseError):
        read_matrix("1 2 3")
    with pytest.raises(ParseError):
        read_matrix("labels: a b\n1 2")
    with pytest.raises(ParseError) as exc:
        read_matrix("labels: a\n\nfoo")
    assert exc.value.line == 3
