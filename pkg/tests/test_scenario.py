import json

import pytest
from hypothesis import given, settings, strategies as st

from opsbd.instgen import GenParams, generate_instance
from opsbd.scenario import (ScenarioError, parse_scenario, read_scenario, reachability_labels,
                            save_scenario, scenario_to_dict, validate_scenario, write_scenario)

from conftest import make_scenario


def test_fig2_counts(fig2):
    assert (fig2.rows, fig2.cols) == (8, 8)
    assert fig2.epsilon == 8
    assert fig2.phi == 2
    assert fig2.n_paths == 16
    assert int(fig2.blocked_mask().sum()) == 6
    assert validate_scenario(fig2) == []


def test_defaults_when_params_omitted():
    s = make_scenario(["E.O"])
    p = s.params
    assert (p.eta, p.theta, p.speed, p.neutralize_time) == (0.06, 0.6, 1.0, 10.0)
    assert p.radius is None
    assert p.dead_length == 10.0


def test_no_objectives_rejected():
    with pytest.raises(ScenarioError, match="no objectives"):
        make_scenario(["E"])


def test_no_entrances_rejected():
    with pytest.raises(ScenarioError, match="no entrances"):
        make_scenario(["..O"])


def test_gamma_not_normalized():
    with pytest.raises(ScenarioError, match="not normalized"):
        make_scenario(["E.O", "E.O"], gamma=[[0.4, 0.05], [0.2, 0.25]])


@pytest.mark.parametrize("grid, msg", [
    (["E.O", "E."], "length"),
    (["E.X"], "unknown"),
])
def test_malformed_grid(grid, msg):
    with pytest.raises(ScenarioError, match=msg):
        make_scenario(grid)


def test_missing_casualty_and_duplicates():
    doc = scenario_to_dict(make_scenario(["E.O.O"], casualties=[1, 2]))
    bad = dict(doc, objectives=doc["objectives"][:1])
    with pytest.raises(ScenarioError, match="casualty"):
        parse_scenario(bad)
    dup = dict(doc, objectives=[doc["objectives"][0]] * 2)
    with pytest.raises(ScenarioError, match="duplicate"):
        parse_scenario(dup)
    with pytest.raises(ScenarioError, match="malformed"):
        parse_scenario("{not json")


def test_walled_objective_reports_each_entrance():
    s = make_scenario(["E...", "..##", "E.#O", "..#."])
    problems = [p for p in validate_scenario(s) if p.startswith("unreachable pair")]
    assert len(problems) == 2


def test_nonpositive_casualties_flagged():
    doc = scenario_to_dict(make_scenario(["E.O"]))
    doc["objectives"][0]["casualties"] = 0.0
    s = parse_scenario(doc)
    assert any("nonpositive casualties" in p for p in validate_scenario(s))


def test_uniform_gamma_marker_and_explicit_order():
    s = make_scenario(["E.O"])
    assert scenario_to_dict(s)["gamma"] == "uniform"
    g = [[0.1, 0.2], [0.3, 0.4]]
    s2 = make_scenario(["E.O", "E.O"], gamma=g)
    assert scenario_to_dict(s2)["gamma"] == g
    assert s2.path_probabilities().tolist() == [0.1, 0.2, 0.3, 0.4]


def test_diagonal_gap_is_reachable():
    # a diagonal step between two blocked cells still has a clear sight line
    s = make_scenario(["E#", "#O"])
    assert validate_scenario(s) == []
    labels = reachability_labels(s)
    assert labels[0, 0] == labels[1, 1]


def test_file_round_trip(tmp_path, fig2):
    path = tmp_path / "s.json"
    save_scenario(fig2, path)
    assert read_scenario(path) == fig2
    assert json.loads(path.read_text())["rows"] == 8


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.booleans())
def test_generated_round_trip(seed, explicit):
    s = generate_instance(GenParams(rows=6, cols=7, objectives=2, entrances_per_side=1, seed=seed))
    if explicit:
        r = s.n_paths
        doc = scenario_to_dict(s)
        doc["gamma"] = [[1.0 / r] * s.phi for _ in range(s.epsilon)]
        s = parse_scenario(doc)
    again = parse_scenario(write_scenario(s))
    assert again == s
    assert write_scenario(again) == write_scenario(s)
