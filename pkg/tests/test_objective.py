import math

import numpy as np
import pytest

from opsbd.objective import (Instance, baseline_casualties, evaluate, evaluate_swap, read_solution,
                             write_solution)

from conftest import make_scenario


def test_baseline_examples():
    assert baseline_casualties(make_scenario(["E.O.O"], casualties=[10, 30])) == pytest.approx(20)
    assert baseline_casualties(make_scenario(["E.O"], casualties=[10])) == 10
    s = make_scenario(["OEO"], casualties=[4, 8], gamma=[[0.25, 0.75]])
    assert baseline_casualties(s) == pytest.approx(7.0)


def line_instance(**params):
    s = make_scenario(["E.....O", "......."], casualties=[10], neutralize_s=0.0, **params)
    return Instance.build(s, radius=10)


def test_single_detector_value():
    inst = line_instance()
    assert inst.cache.lam[0, 3, 0] == pytest.approx(20.0)
    w = evaluate([(1, 4)], inst)
    assert w == pytest.approx(0.4 * 10 + 0.6 * 10 * math.exp(-1.2), abs=1e-12)
    assert w == pytest.approx(5.80716, abs=1e-5)


def test_empty_and_useless_neutralization():
    inst = line_instance()
    assert evaluate([], inst) == pytest.approx(inst.baseline)
    inst0 = line_instance(theta=0.0)
    assert evaluate([(1, 4), (2, 2)], inst0) == pytest.approx(inst0.baseline)


def test_invalid_cells(fig2_instance):
    with pytest.raises(ValueError):
        evaluate([(3, 4)], fig2_instance)  # blocked
    with pytest.raises(ValueError):
        evaluate([(9, 1)], fig2_instance)
    with pytest.raises(ValueError):
        evaluate([(1, 1), (1, 1)], fig2_instance)


def test_value_permutation_invariant(fig2_instance):
    cells = [(5, 5), (2, 3), (7, 7)]
    assert evaluate(cells, fig2_instance) == evaluate(cells[::-1], fig2_instance)


def test_swap_cases(fig2_instance):
    inst = fig2_instance
    sol = [(5, 5), (2, 3)]
    totals = inst.totals(inst.flat_of(sol))
    w0 = evaluate(sol, inst)
    zero = next(inst.cells_of([f])[0] for f in range(64)
                if inst.cache.blocked.reshape(-1)[f] == 0 and not inst.lam_flat[f].any())
    w1, _ = evaluate_swap(sol, (2, 3), zero, totals, inst)
    assert w1 >= w0
    with pytest.raises(ValueError):
        evaluate_swap(sol, (2, 3), (5, 5), totals, inst)
    with pytest.raises(ValueError):
        evaluate_swap(sol, (1, 8), (4, 4), totals, inst)


def test_identical_coverage_swap():
    # a row of cells far from the single path all see nothing
    s = make_scenario(["E...O", ".....", ".....", ".....", "....."], neutralize_s=0.0)
    inst = Instance.build(s, radius=10)
    sol = [(1, 3), (5, 1)]
    w0 = evaluate(sol, inst)
    w1, _ = evaluate_swap(sol, (5, 1), (5, 5), inst.totals(inst.flat_of(sol)), inst)
    assert abs(w1 - w0) <= 1e-9


def test_solution_file_round_trip(tmp_path, fig2_instance):
    sol = fig2_instance.solution(fig2_instance.flat_of([(2, 3), (5, 5)]))
    path = tmp_path / "sol.json"
    write_solution(path, sol, delta=2, scenario_name="x", algorithm="hc", seed=3, radius=10.0)
    back, meta = read_solution(path)
    assert back == sol
    assert meta["radius_m"] == 10.0 and meta["algorithm"] == "hc"
