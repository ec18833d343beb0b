import json
import subprocess
import sys

import pytest

from varcomplex.cli import main, run_command
from varcomplex.problem import ProblemError, parse_problem
from varcomplex.render import Report, form_from_records, latex_source, render, source_from_record
from varcomplex.varops import euler_lagrange


def run(*argv, stdin=None):
    proc = subprocess.run([sys.executable, "-m", "varcomplex", *argv], capture_output=True,
                          text=True, input=stdin)
    return proc.returncode, proc.stdout, proc.stderr


def test_parse_problem_example():
    pf = parse_problem('{"bundle":{"base":["x"],"fiber":["u"]},"lagrangian":"1/2*u_x^2"}')
    assert str(pf.lagrangian) == "Form(1/2*u_x^2*dx)"


def test_parse_problem_errors():
    with pytest.raises(ProblemError) as info:
        parse_problem('{"bundle":{"base":["x"],"fiber":["u"]},"lagrangian":"v_x"}')
    assert info.value.kind == "unknown-variable" and info.value.name == "v"
    with pytest.raises(ProblemError) as info:
        parse_problem("")
    assert info.value.kind == "schema"
    with pytest.raises(ProblemError) as info:
        parse_problem('{"bundle": {"base": ["x"],\n "fiber": [}')
    assert info.value.kind == "syntax" and info.value.line == 2
    with pytest.raises(ProblemError) as info:
        parse_problem('{"bundle":{"base":["x"],"fiber":["u"]},"truncation":{"max_jet_order":-1,"max_poly_degree":1}}')
    assert info.value.path == "$.truncation.max_jet_order"
    with pytest.raises(ProblemError) as info:
        parse_problem('{"bundle":{"base":["x"],"fiber":["u"]},"colour":1}')
    assert info.value.path == "$.colour"


def test_el_command(capsys):
    assert main(["el", "--base", "x", "--fiber", "u", "--lagrangian", "1/2*u_x^2"]) == 0
    assert capsys.readouterr().out == "E_u = -u_xx\n"


def test_latex_rendering(line, ex):
    from varcomplex.forms import SourceForm

    assert latex_source(SourceForm(line, (ex("-u_xx", line),))) == r"-u_{xx}\,\theta^{u}\wedge dx"


def test_zero_form_text():
    assert render(Report("x", {}, ["0"]), "text") == "0\n"


def test_helmholtz_exit_codes(capsys):
    assert main(["helmholtz", "--base", "x", "--fiber", "u", "--source", "u=u_x"]) == 1
    out = capsys.readouterr().out
    assert "fail" in out and "certificate: -dx^th(u)^th(u;x)" in out
    assert main(["helmholtz", "--base", "x", "--fiber", "u", "--source", "u=-u_xx"]) == 0


def test_usage_errors(capsys):
    assert main(["el", "--base", "x", "--fiber", "u"]) == 2
    assert main(["el", "--base", "x", "--fiber", "u", "--lagrangian", "v"]) == 2
    assert main(["apply", "--base", "x", "--fiber", "u", "--form", "u", "--operator", "nope"]) == 2
    assert main(["el", "--base", "x", "--fiber", "u", "--lagrangian", "u +"]) == 2
    err = capsys.readouterr().err
    assert "unknown variable 'v'" in err
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_problem_file(tmp_path, capsys):
    doc = {"bundle": {"base": ["t"], "fiber": ["u"]}, "lagrangian": "1/2*u_t^2",
           "vector_field": {"u": "1"}}
    path = tmp_path / "p.json"
    path.write_text(json.dumps(doc))
    assert main(["noether", "--problem", str(path)]) == 0
    assert "J = u_t" in capsys.readouterr().out
    bad = tmp_path / "bad.json"
    bad.write_text('{"bundle": ')
    assert main(["el", "--problem", str(bad)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_json_round_trip(capsys, line, ex, fm):
    assert main(["el", "--base", "x", "--fiber", "u", "--lagrangian", "1/2*u_x^2*u", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    from varcomplex.varops import lagrangian

    assert source_from_record(data["source"], line) == euler_lagrange(lagrangian(line, ex("1/2*u_x^2*u", line)))
    assert main(["apply", "--base", "x", "--fiber", "u", "--form", "u*th(u;x)^dx", "--operator", "tau",
                 "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert form_from_records(data["result"], line) == fm("-u_x*th(u)^dx", line)


def test_betti_csv(capsys):
    assert main(["betti", "--base", "x", "--fiber", "u", "--max-order", "1", "--max-degree", "1", "--csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("position,") and len(lines) == 3


def test_run_command_requires_bundle():
    from varcomplex.cli import UsageError

    with pytest.raises(UsageError):
        run_command("el", None)


@pytest.mark.parametrize("argv", [
    ["el", "--base", "t,x", "--fiber", "u", "--lagrangian", "1/2*(u_t^2-u_x^2)", "--format", "latex"],
    ["split", "--base", "x", "--fiber", "u", "--lagrangian", "1/2*u_xx^2", "--format", "json"],
    ["props", "--seed", "1", "--cases", "20"],
])
def test_byte_identical_subprocess_runs(argv):
    first, second = run(*argv), run(*argv)
    assert first == second
    assert first[0] == 0


def test_problem_from_stdin():
    code, out, _ = run("reconstruct", "--problem", "-",
                       stdin='{"bundle":{"base":["x"],"fiber":["u"]},"source_form":{"u":"-u_xx"}}')
    assert code == 0 and out == "L = -1/2*u*u_xx*dx\n"
