import json
import subprocess
import sys

import pytest

from srmcts.cli import main
from srmcts.env import load_transcript
from srmcts.instance import load_instance


def test_gen_and_run(tmp_path, capsys):
    inst_path = tmp_path / "inst.json"
    assert main(["gen", "--instance", "structured:3x4:2", "--out", str(inst_path)]) == 0
    inst = load_instance(inst_path)
    assert (inst.K, inst.L) == (3, 4)
    tr_path = tmp_path / "tr.json"
    assert main(["run", "--instance", str(inst_path), "--budgets", "200", "--out", str(tr_path)]) == 0
    tr = load_transcript(tr_path)
    assert tr.spent <= 200 and tr.algorithm == "sr-mcts"
    assert main(["gen", "--instance", "rho:0.5"]) == 0
    assert json.loads(capsys.readouterr().out)["means"] == [[0.5, 1.0], [0.0, 0.25]]


def test_sweeps_write_csv_and_svg(tmp_path):
    out = tmp_path / "o"
    args = ["--instance", "structured:3x3:0", "--algo", "sr-mcts,uniform", "--trials", "20", "--out", str(out)]
    assert main(["sweep-budget", "--budgets", "60,90", *args]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "algo,budget,eps,errors,trials,rate,se" and len(lines) == 5
    assert (out / "sweep.svg").exists()
    assert main(["sweep-eps", "--budgets", "90", "--eps", "0,0.02,0.04", *args]) == 0
    assert len((out / "sweep.csv").read_text().splitlines()) == 7


def test_sweep_csv_is_reproducible(tmp_path):
    def run(d, workers):
        main(["sweep-budget", "--instance", "random:3x3:1", "--budgets", "60,90", "--trials", "30",
              "--workers", str(workers), "--out", str(d)])
        return (d / "sweep.csv").read_bytes()

    assert run(tmp_path / "a", 1) == run(tmp_path / "b", 2)


def test_heatmap(tmp_path):
    assert main(["heatmap", "--instance", "structured:2x3:0", "--algo", "uniform", "--budgets", "60",
                 "--trials", "3", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "heatmap.csv").read_text().splitlines()
    assert lines[0] == "subtree,leaf,mean_pulls"
    assert all(line.endswith(",10.000000") for line in lines[1:])
    assert (tmp_path / "heatmap.svg").exists()


def test_h2check(tmp_path, capsys):
    assert main(["h2check", "--instance", "structured:3x3:0", "--budgets", "40,80,160,320",
                 "--trials", "200", "--out", str(tmp_path), "--norm", "overline"]) == 0
    assert "r2=" in capsys.readouterr().out
    assert (tmp_path / "h2check.csv").read_text().startswith("budget,x,log_rate")


def test_bound_and_lb_verify(capsys, tmp_path):
    assert main(["bound", "--instance", "rho:0.5", "--budgets", "100", "--eps", "0"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[1].startswith("100,0,12,30.76")
    rep = tmp_path / "lb.txt"
    assert main(["lb-verify", "--instance", "rho:0.5", "--budgets", "5", "--out", str(rep)]) == 0
    text = rep.read_text()
    assert "H: 13" in text and "H_lb: 5" in text and "lb_exponent: 0.0338338" in text
    assert "violations: 0" in text


@pytest.mark.parametrize("argv", [
    ["run", "--instance", "rho:0.5", "--budgets", "3"],
    ["sweep-budget", "--instance", "rho:0.5", "--budgets", "2"],
    ["sweep-budget", "--instance", "rho:0.5", "--algo", "magic"],
    ["gen", "--instance", "missing.json"],
    ["heatmap", "--instance", "rho:0.5", "--budgets", "50,60"],
])
def test_errors_exit_nonzero_with_diagnostic(argv, capsys):
    assert main(argv) != 0
    err = capsys.readouterr().err
    assert err.startswith(f"srmcts {argv[0]}: error:") and err.count("\n") == 1


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "srmcts.cli", "bound", "--instance", "rho:0.5",
                        "--budgets", "100"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("budget,eps,h2,bound,capped")
