import csv
import json
import os

import pytest

from opsbd.cli import main

from conftest import DATA

FIG2 = os.path.join(DATA, "fig2_8x8.json")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def test_generate_solve_simulate(tmp_path, capsys):
    scen = tmp_path / "s.json"
    code, out = run(capsys, "generate", "--rows", 12, "--cols", 12, "--seed", 4, "--out", scen)
    assert code == 0 and scen.exists()
    sol, trace = tmp_path / "sol.json", tmp_path / "t.csv"
    code, out = run(capsys, "solve", "--scenario", scen, "--algo", "grasp+hc", "--detectors", 3,
                    "--evals", 3000, "--seed", 2, "--alpha", 0.1, "--out", sol, "--trace", trace)
    assert code == 0 and out.startswith("W=")
    doc = json.loads(sol.read_text())
    assert len(doc["detectors"]) == 3 and doc["algorithm"] == "grasp-hc"
    assert trace.read_text().splitlines()[0] == "elapsed_s,evals,best_w"
    code, out = run(capsys, "simulate", "--scenario", scen, "--solution", sol, "--trials", 20000,
                    "--seed", 1)
    assert code == 0 and "analytic=" in out


def test_benchmark_grid_rejects_small(tmp_path, capsys):
    code = main(["generate", "--rows", "8", "--cols", "8", "--out", str(tmp_path / "x.json"), "--paper-grid"])
    assert code == 2


def test_exact_flags_agree(capsys):
    _, a = run(capsys, "exact", "--scenario", FIG2, "--detectors", 2, "--radius", 10)
    _, b = run(capsys, "exact", "--scenario", FIG2, "--detectors", 2, "--radius", 10, "--no-pruning")
    assert a.splitlines()[0].split()[0] == b.splitlines()[0].split()[0]
    assert a.splitlines()[1] == b.splitlines()[1]


def test_radius_required(capsys):
    with pytest.raises(SystemExit):
        main(["exact", "--scenario", FIG2, "--detectors", "2"])


def test_dominance_and_paths(tmp_path, capsys):
    out = tmp_path / "d.csv"
    code, _ = run(capsys, "dominance", "--scenario", FIG2, "--detectors", 3, "--radius", 10, "--out", out)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 64
    p = tmp_path / "p.csv"
    code, msg = run(capsys, "paths", "--scenario", FIG2, "--out", p)
    assert "16 paths" in msg
    code, msg = run(capsys, "validate", "--scenario", FIG2)
    assert code == 0


def test_bench_and_qrtd(tmp_path, capsys):
    cfgp = tmp_path / "cfg.json"
    cfgp.write_text(json.dumps({
        "instances": [{"file": FIG2}],
        "algorithms": [{"name": "greedy"}, {"name": "hc"}, {"name": "grasp", "alpha": 0.5}],
        "deltas": [3], "radius": 10, "budget": {"evals": 2000}, "seeds": [1, 2],
    }))
    outdir = tmp_path / "out"
    code, out = run(capsys, "bench", "--config", cfgp, "--out-dir", outdir, "--jobs", 2)
    assert code == 0 and "6 runs, 0 failed" in out
    q = tmp_path / "q.csv"
    code, out = run(capsys, "qrtd", "--traces", str(outdir / "traces" / "*.csv"), "--out", q,
                    "--quality-eps", 0.01)
    assert code == 0
    rows = list(csv.DictReader(q.open()))
    assert {r["algorithm"] for r in rows} == {"greedy", "hc", "grasp@0.5"}


def test_bad_algorithm(capsys):
    with pytest.raises(SystemExit):
        main(["solve", "--scenario", FIG2, "--algo", "tabu", "--detectors", "2", "--evals", "5"])
