import json
import subprocess
import sys

import pytest

from posa.cli import GATE, OK, USAGE, main
from posa.graph import Graph, write_edgelist


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_constants(capsys):
    code, out, _ = run(capsys, "constants")
    d = json.loads(out)
    assert code == OK
    assert d["lambda_star_star"] == pytest.approx(4.789771, abs=1e-5)
    assert d["a_star"] == pytest.approx(2.6616, abs=1e-3)
    assert d["epsilon0"] == pytest.approx(0.0117472, abs=1e-6)


def test_constants_thresholds(capsys):
    code, out, _ = run(capsys, "constants", "--support", "3,4", "--n", "1000", "100000")
    d = json.loads(out)
    assert code == OK and set(d["thresholds"]) == {"1000", "100000"}
    assert d["a_star"] == pytest.approx(17 / 9, abs=0.02)


def test_bad_support(capsys):
    code, _, err = run(capsys, "constants", "--support", "banana")
    assert code == USAGE and "banana" in err


def test_sample_round_trip(capsys, tmp_path):
    p = tmp_path / "g.txt"
    assert main(["sample", "--n", "100", "--c", "5.4", "--seed", "4", "--out", str(p)]) == OK
    head = p.read_text().splitlines()[0]
    assert head == "100 270 4"
    code, out, _ = run(capsys, "sample", "--n", "100", "--c", "5.4", "--seed", "4")
    assert out == p.read_text()
    code, out, _ = run(capsys, "posa", "--graph", str(p))
    d = json.loads(out)
    assert code == OK and d["closed"] and d["seed"] == 4


def test_sample_needs_size(capsys):
    code, _, err = run(capsys, "sample", "--seed", "1")
    assert code == USAGE


def test_posa_gate_on_cycle(capsys, tmp_path):
    # a cycle breaks the minimum-degree hypothesis, so a hard check fails
    p = write_edgelist(Graph.cycle(5), tmp_path / "c5.txt")
    code, out, _ = run(capsys, "posa", "--graph", str(p), "--v0", "0")
    assert code == GATE
    assert json.loads(out)["checks"]["dense_union"] == "fail"


def test_scan(capsys, tmp_path):
    k4 = write_edgelist(Graph.complete(4), tmp_path / "k4.txt")
    code, out, _ = run(capsys, "scan", "--graph", str(k4), "--k-max", "4")
    assert code == OK and json.loads(out)["witness"]["vertices"] == [0, 1, 2, 3]
    code, _, err = run(capsys, "scan", "--graph", str(k4), "--k-max", "99")
    assert code == USAGE
    csv = tmp_path / "census.csv"
    code, out, _ = run(capsys, "scan", "--n", "400", "--c", "5.4", "--seed", "2",
                       "--density-samples", "2", "--csv", str(csv))
    assert code == OK and "profile" in json.loads(out)
    assert csv.read_text().startswith("n,trial,k,")


def test_bounds(capsys, tmp_path):
    csv = tmp_path / "sweep.csv"
    code, out, _ = run(capsys, "bounds", "--n", "1000000", "--c", "5.4", "--csv", str(csv))
    d = json.loads(out)
    assert code == OK and d["max_exponent"] < 0
    assert csv.read_text().splitlines()[0] == \
        "s,t,x,regime,log_estar_per_vertex,remainder_budget"
    code, _, _ = run(capsys, "bounds", "--c", "5.4")
    assert code == USAGE


def test_mc(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"seed = 3\nn_list = 200\ntrials = 2\nout_dir = {tmp_path / 'o'}\n")
    code, out, _ = run(capsys, "mc", "--config", str(cfg), "--trials", "3")
    d = json.loads(out)
    assert code == OK and d["records"] == 3 and d["hard_gate_failures"] == 0
    assert (tmp_path / "o" / "trials.csv").exists()
    code, _, err = run(capsys, "mc", "--n-list", "200")
    assert code == USAGE and "seed" in err
    code, _, _ = run(capsys, "mc", "--seed", "1", "--c", "2.5")
    assert code == USAGE


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "posa", "constants"], capture_output=True,
                         text=True, timeout=120)
    assert res.returncode == 0
    assert json.loads(res.stdout)["c_star_star"] == pytest.approx(5.323132, abs=1e-5)
