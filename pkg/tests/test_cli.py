import io
import re
from contextlib import redirect_stdout

import pytest

from gstaudt.cli import main, parse_assignment, parse_form
from gstaudt.cicore import read_matrix
from gstaudt.encoder import read_constraint_set
from gstaudt.errors import ParseError
from gstaudt.poly import parse_system


def run(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write, tmp_path


def test_pipeline_rational_value_fails_vanishing(files):
    write, tmp = files
    sysf = write("sys.txt", "t^2 - 2 = 0\n")
    code, _ = run("compile", sysf, "-o", str(tmp / "cs.txt"))
    assert code == 0
    cs = read_constraint_set((tmp / "cs.txt").read_text())
    assert cs.count_by_origin()["I.vi"] == 1

    write("a.txt", "t = 3/2  # not a root\n")
    code, _ = run("witness", sysf, str(tmp / "a.txt"), "-o", str(tmp / "m.txt"),
                  "--report", str(tmp / "r.tsv"))
    assert code == 0
    assert read_matrix((tmp / "m.txt").read_text()).n == len(cs.ground.labels)
    assert "residual\tf1\t1/4" in (tmp / "r.tsv").read_text()

    code, out = run("check", str(tmp / "m.txt"), str(tmp / "cs.txt"))
    assert code == 1
    fails = [l for l in out.splitlines() if l.startswith("FAIL")]
    assert len(fails) == 1 and fails[0].endswith(",x|)")
    assert "verdict: violated (1 of" in out


def test_pipeline_root_passes(files):
    write, tmp = files
    sysf = write("sys.txt", "t^2 - 2 = 0\n")
    run("compile", sysf, "-o", str(tmp / "cs.txt"))
    write("a.txt", "t = sqrt(2)\n")
    assert run("witness", sysf, str(tmp / "a.txt"), "-o", str(tmp / "m.txt"), "--sx", "3")[0] == 0
    code, out = run("check", str(tmp / "m.txt"), str(tmp / "cs.txt"))
    assert code == 0 and "verdict: satisfied (0 of" in out


def test_inequalities_get_slacks(files):
    write, tmp = files
    sysf = write("sys.txt", "t^2 - 2 = 0\nt > 0\n")
    write("a.txt", "t = sqrt(2)\n")
    assert run("witness", sysf, str(tmp / "a.txt"), "-o", str(tmp / "m.txt"))[0] == 3
    write("a2.txt", "t = 1\n")
    assert run("witness", sysf, str(tmp / "a2.txt"), "-o", str(tmp / "m.txt"))[0] == 0


def test_check_simecek_semidefinite(files):
    write, _ = files
    m = write("m.txt", "labels: 1 2 3 4\n1 -1/17 -49/51 -7/17\n1 1/3 1/7\n1 3/7\n1\n")
    c = write("c.txt", "ground: 1 2 3 4\n(1,2|4)\n(1,4|3)\n(1,4|2 3)\n(2,4|3)\n(2,4|1 3)\n(3,4|1 2)\n!(1,2|)\n")
    code, out = run("check", m, c, "--semantics", "semidefinite")
    assert code == 0, out
    assert "positive semidefiniteness: ok" in out
    assert run("check", m, c)[0] == 1


def test_check_identity(files):
    write, _ = files
    m = write("m.txt", "labels: a b c\n1 0 0\n1 0\n1\n")
    c = write("c.txt", "ground: a b c\n(a,b|)\n(a,c|b)\n(b,c|a)\n")
    assert run("check", m, c)[0] == 0


def test_reduce_output_compiles(files):
    write, tmp = files
    c = write("c.txt", "ground: a b c d\n(a,b|c d)\n!(a,c|)\n")
    assert run("reduce", c, "-o", str(tmp / "s.txt"))[0] == 0
    text = (tmp / "s.txt").read_text()
    assert "# s1_2 = sigma(a,b)" in text
    assert len(parse_system(text)) > 0
    assert run("reduce", c, "--max-n", "3")[0] == 3


def test_error_exit_codes(files):
    write, tmp = files
    bad = write("bad.txt", "t^^2 = 0\n")
    assert run("compile", bad)[0] == 2
    conflict = write("c.txt", "ground: a b\n(a,b|)\n!(a,b|)\n")
    m = write("m.txt", "labels: a b\n1 0\n1\n")
    assert run("check", m, conflict)[0] == 2
    assert run("check", m, str(tmp / "missing.txt"))[0] == 3
    sysf = write("sys.txt", "t - 1 = 0\n")
    empty = write("a.txt", "")
    assert run("witness", sysf, empty)[0] == 3
    write("b.txt", "t = 1\n")
    assert run("witness", sysf, str(tmp / "b.txt"), "--form", "1 0 0; 0 -1 0; 0 0 1")[0] == 3


def test_header_digest(files):
    write, _ = files
    sysf = write("sys.txt", "t - 1 = 0\n")
    code, out = run("compile", sysf)
    lines = out.splitlines()
    assert lines[0].startswith("# gstaudt ") and lines[0].endswith(" compile")
    assert re.fullmatch(r"# input sha256 [0-9a-f]{64}", lines[1])
    assert run("compile", sysf)[1] == out


@pytest.mark.parametrize("name", ["sqrt2", "simecek85", "illdefined"])
def test_demos_are_stable(name):
    code, first = run("demo", name)
    assert code == 0 and first.rstrip().endswith("result: as expected")
    assert run("demo", name)[1] == first


def test_parse_helpers():
    assert parse_assignment("x = 1/2\n# c\ny = 1+sqrt(3)\n")["x"] == parse_assignment("x=1/2")["x"]
    with pytest.raises(ParseError) as exc:
        parse_assignment("x = 1\ny 2\n")
    assert exc.value.line == 2
    assert parse_form("2 0 0; 0 1 0; 0 0 1")[0][0] == 2
    with pytest.raises(ParseError):
        parse_form("1 0; 0 1")
