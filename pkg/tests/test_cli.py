import json

import pytest

from abforge.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from abforge.core import AbelianProcessor
from abforge.network import Builder, export_json
from abforge.gates import adder, splitter, toppler
from abforge.synth import feedback_delayer


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    def fixture(name):
        path = str(tmp_path / (name.replace(":", "_") + ".json"))
        assert main(["fixture", name, "-o", path]) == EXIT_OK
        return path

    write.fixture = fixture
    write.dir = tmp_path
    return write


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_toppler(files, capsys):
    code, out, _ = run_cli(capsys, "check", files.fixture("toppler:3"))
    assert code == EXIT_OK and out.strip() == "recurrent, exponent 3"


def test_check_non_abelian(files, capsys):
    zero = ((0,),) * 3
    p = AbelianProcessor.build([(1, 2, 0), (2, 2, 0)], [zero, zero])
    code, out, _ = run_cli(capsys, "check", files("bad.json", p.to_json()))
    assert code == EXIT_FAIL and "not abelian" in out


def test_check_fig6(files, capsys):
    code, out, _ = run_cli(capsys, "check", files.fixture("fig6"))
    assert code == EXIT_OK and out.startswith("ZILP, k=2")


def test_check_json_output(files, capsys):
    code, out, _ = run_cli(capsys, "check", "--json", files.fixture("toppler:4:1"))
    d = json.loads(out)
    assert d["recurrent"] and d["exponent"] == 4


def test_parse_error_reports_position(files, capsys):
    code, _, err = run_cli(capsys, "check", files("broken.json", '{\n  "k": 1,\n  oops\n}'))
    assert code == EXIT_USAGE or code == EXIT_FAIL
    assert "line 3" in err


def test_compile_fig5(files, capsys):
    out_path = str(files.dir / "fig5_net.json")
    code, out, _ = run_cli(capsys, "compile", files.fixture("fig5"), "--mode", "recurrent",
                           "-o", out_path)
    assert code == EXIT_OK and "toppler=3" in out
    code, out, _ = run_cli(capsys, "run", out_path, "--input", "10")
    assert code == EXIT_OK and out.splitlines()[0] == "output: 9"
    code, out, _ = run_cli(capsys, "verify", files.fixture("fig5"), out_path)
    assert code == EXIT_OK and out.startswith("PASS")


def test_compile_presink_bounded(files, capsys):
    code, out, _ = run_cli(capsys, "compile", files.fixture("presink-fn"), "--mode", "bounded",
                           "-o", str(files.dir / "p.json"))
    assert code == EXIT_OK and "presink=1" in out and "toppler" not in out


def test_compile_mode_mismatch(files, capsys):
    code, _, err = run_cli(capsys, "compile", files.fixture("delayer-fn"), "--mode", "recurrent")
    assert code == EXIT_USAGE and "margins" in err


def test_compile_fig6_feedback(files, capsys):
    net_path = str(files.dir / "fig6_fb.json")
    code, out, _ = run_cli(capsys, "compile", files.fixture("fig6"), "--rewrite", "feedback",
                           "-o", net_path, "--json")
    d = json.loads(out)
    assert code == EXIT_OK and d["halting"] == "feedback_ok" and not d["acyclic"]
    code, out, _ = run_cli(capsys, "verify", files.fixture("fig6"), net_path, "--fuzz", "10")
    assert code == EXIT_OK


def test_compiled_networks_pass_default_verify(files, capsys):
    for name in ("fig5", "floor:3:1", "delayer-fn", "presink-fn", "fig6"):
        net_path = str(files.dir / (name.replace(":", "_") + "_net.json"))
        assert run_cli(capsys, "compile", files.fixture(name), "-o", net_path)[0] == EXIT_OK
        code, out, _ = run_cli(capsys, "verify", files.fixture(name), net_path, "--fuzz", "20")
        assert code == EXIT_OK, out


def test_run_zero_input(files, capsys):
    code, out, _ = run_cli(capsys, "run", files.fixture("rotor:3"))
    assert code == EXIT_OK and out.splitlines()[0] == "output: 0,0,0"


def test_run_delayer_loop(files, capsys):
    path = files("loop.json", export_json(feedback_delayer()))
    code, out, _ = run_cli(capsys, "run", path, "--input", "5", "--schedule", "random", "--seed", "9")
    assert code == EXIT_OK and out.splitlines()[0] == "output: 4"


def test_run_trace_and_json(files, capsys):
    code, out, _ = run_cli(capsys, "run", files.fixture("rotor:2"), "--input", "2,1", "--trace",
                           "--json")
    d = json.loads(out)
    assert d["halted"] and len(d["trace"]) == d["steps"]


def test_run_budget_exit_code(files, capsys):
    b = Builder()
    back = b.forward()
    s = b.gate(adder(), [b.input(), back])[0]
    out_wire, loop = b.gate(splitter(), [s])
    b.bind(back, loop)
    b.output(out_wire)
    path = files("runaway.json", export_json(b.build()))
    code, out, _ = run_cli(capsys, "run", path, "--input", "1", "--budget", "100")
    assert code == EXIT_BUDGET and "exceeded" in out


def test_run_wrong_arity(files, capsys):
    code, _, _ = run_cli(capsys, "run", files.fixture("rotor:3"), "--input", "1")
    assert code == EXIT_USAGE


def test_verify_misprimed(files, capsys):
    b = Builder()
    branches = b.gate(splitter(3), [b.input()])
    outs = [b.gate(toppler(4, 2), [x])[0] for x in branches]
    b.output(b.gate(adder(3), outs)[0])
    path = files("bad_net.json", export_json(b.build()))
    code, out, _ = run_cli(capsys, "verify", files.fixture("fig5"), path)
    assert code == EXIT_FAIL and "mismatch at x=1" in out


def test_verify_bounds_and_report(files, capsys):
    net_path = str(files.dir / "fig5_net.json")
    run_cli(capsys, "compile", files.fixture("fig5"), "-o", net_path)
    report_path = str(files.dir / "report.txt")
    code, out, _ = run_cli(capsys, "verify", files.fixture("fig5"), net_path, "--bounds", "12",
                           "--report", report_path)
    assert code == EXIT_OK and "13 grid points, 100 schedules" in out
    assert open(report_path).read().startswith("PASS")
    code, _, _ = run_cli(capsys, "verify", files.fixture("fig5"), net_path, "--bounds", "2")
    assert code == EXIT_USAGE


def test_seed_from_environment(files, capsys, monkeypatch):
    net_path = str(files.dir / "fig5_net.json")
    run_cli(capsys, "compile", files.fixture("fig5"), "-o", net_path)
    monkeypatch.setenv("ABFORGE_SEED", "77")
    code, out, _ = run_cli(capsys, "verify", files.fixture("fig5"), net_path, "--fuzz", "5")
    assert "seed 77" in out


def test_export_formats(files, capsys):
    code, out, _ = run_cli(capsys, "export", files.fixture("rotor:3"))
    assert code == EXIT_OK and out.startswith("digraph")
    path = files.fixture("rotor:3")
    code, out, _ = run_cli(capsys, "export", path, "--format", "json")
    again = files("again.json", out.strip())
    code, out2, _ = run_cli(capsys, "export", again, "--format", "json")
    assert out == out2


def test_export_single_toppler_dot(files, capsys):
    b = Builder()
    b.output(b.gate(toppler(3), [b.input()])[0])
    path = files("t3.json", export_json(b.build()))
    code, out, _ = run_cli(capsys, "export", path)
    assert 'label="T3:0"' in out


def test_unknown_fixture(capsys):
    code, _, err = run_cli(capsys, "fixture", "nonesuch")
    assert code == EXIT_USAGE and "unknown fixture" in err


def test_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--help"])
    out = capsys.readouterr().out
    assert e.value.code == 0
    for cmd in ("check", "compile", "run", "verify", "export", "fixture"):
        assert cmd in out
