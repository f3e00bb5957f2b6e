import pytest

from conftest import DATA
from modex.algebra import accepts_total
from modex.cli import load_system, main
from modex.structures import parse_instance


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_solve_k3(capsys):
    code, out = run(capsys, "solve", DATA / "k3.mx", "--instance", DATA / "k3.inst")
    assert code == 0
    lines = out.out.splitlines()
    assert lines[0] == "MODEL"
    colour_facts = [l for l in lines if l.split()[:2] in (["rel", "R"], ["rel", "G"], ["rel", "B"])]
    assert len(colour_facts) == 3  # one true colour per vertex, 9 colour atoms decided


def test_model_round_trip(capsys):
    code, out = run(capsys, "solve", DATA / "k3.mx", "--instance", DATA / "k3.inst")
    model = parse_instance(out.out.split("\n", 1)[1])
    flat, oracles, _ = load_system(DATA / "k3.mx", DATA / "k3.inst")
    assert accepts_total(flat, oracles, model)


def test_solve_unsat(capsys):
    code, out = run(capsys, "solve", DATA / "k4clique.mx", "--instance", DATA / "k4.inst")
    assert code == 20 and out.out.strip() == "UNSAT"


def test_resource_out(capsys):
    code, out = run(capsys, "solve", DATA / "k3.mx", "--instance", DATA / "k3.inst", "--max-iterations", "1")
    assert code == 30 and out.out.strip() == "RESOURCE-OUT iterations"


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as info:
        main(["solve", "--help"])
    assert info.value.code == 0
    assert "--instance" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [["solve"], ["bogus"], [], ["solve", "x.mx", "--instance", "nope.inst"],
                                  ["solve", str(DATA / "k3.mx"), "--instance", str(DATA / "k3.inst"),
                                   "--report-mode", "sometimes"]])
def test_usage_errors(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 10


def test_trace_and_cnf_files(tmp_path, capsys):
    trace, cnf = tmp_path / "t.txt", tmp_path / "f.cnf"
    run(capsys, "solve", DATA / "smt.mx", "--instance", DATA / "smt.inst", "--trace", trace, "--dump-cnf", cnf)
    assert trace.read_text().splitlines()[-1] == "model"
    assert "p cnf 9" in cnf.read_text()


def test_verify_and_certify(capsys):
    code, out = run(capsys, "verify", DATA / "k3.mx", "--instance", DATA / "k3.inst")
    assert code == 0 and out.out.startswith("SOLUTIONS 6")
    code, out = run(capsys, "certify", DATA / "smt.mx", "--instance", DATA / "smt.inst", "--module", "ILP",
                    "--probes", "200")
    assert code == 0 and "violations=0" in out.out
    code, out = run(capsys, "certify", DATA / "smt.mx", "--instance", DATA / "smt.inst", "--module", "NOPE")
    assert code == 10


def test_syntax_error_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.mx"
    bad.write_text('module A clausal "a.cnf"\nsystem S := A &\n')
    code, out = run(capsys, "solve", bad, "--instance", DATA / "k3.inst")
    assert code == 10 and "3:1" in out.err
