"""Invariants checked over random instances, solutions and geometry."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opsbd.geometry import Polyline, chord_length, truncate_dead_zone
from opsbd.instgen import GenParams, generate_instance
from opsbd.objective import Instance, evaluate, evaluate_swap
from opsbd.solvers import Budget, run_solver

_CACHE = {}


def instance(seed):
    if seed not in _CACHE:
        p = GenParams(rows=10, cols=10, entrances_per_side=1, objectives=3, blocked_fraction=0.05,
                      radius=20, seed=seed)
        _CACHE[seed] = Instance.build(generate_instance(p))
    return _CACHE[seed]


def free_cells(inst):
    return [c for c in inst.scenario.unblocked_cells()]


@st.composite
def placements(draw, min_size=0, max_size=6):
    inst = instance(draw(st.integers(0, 7)))
    cells = free_cells(inst)
    k = draw(st.integers(min_size, max_size))
    idx = draw(st.lists(st.integers(0, len(cells) - 1), min_size=k, max_size=k, unique=True))
    return inst, [cells[i] for i in idx]


@settings(max_examples=150, deadline=None)
@given(placements())
def test_objective_bounds(case):
    inst, cells = case
    w = evaluate(cells, inst)
    assert inst.floor - 1e-9 <= w <= inst.baseline + 1e-9


@settings(max_examples=150, deadline=None)
@given(placements(min_size=0, max_size=5), st.data())
def test_adding_a_detector_never_hurts(case, data):
    inst, cells = case
    rest = [c for c in free_cells(inst) if c not in cells]
    extra = data.draw(st.sampled_from(rest))
    assert evaluate(cells + [extra], inst) <= evaluate(cells, inst) + 1e-12


@settings(max_examples=150, deadline=None)
@given(placements(min_size=1, max_size=6), st.data())
def test_swap_matches_full_evaluation(case, data):
    inst, cells = case
    out = data.draw(st.sampled_from(cells))
    rest = [c for c in free_cells(inst) if c not in cells]
    new = data.draw(st.sampled_from(rest))
    totals = inst.totals(inst.flat_of(cells))
    w, new_totals = evaluate_swap(cells, out, new, totals, inst)
    swapped = [c for c in cells if c != out] + [new]
    assert abs(w - evaluate(swapped, inst)) <= 1e-9
    assert np.allclose(new_totals, inst.totals(inst.flat_of(swapped)))


coord = st.floats(-80, 80, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(coord, coord, coord, st.floats(0.5, 40))
def test_chord_closed_form(x0, offset, cx, r):
    # a horizontal line at distance |offset| from the center, long enough to cross the disk
    d = abs(offset)
    got = chord_length((cx - 200, offset), (cx + 200, offset), (cx, 0.0), r)
    want = 2 * math.sqrt(r * r - d * d) if d < r else 0.0
    assert got == pytest.approx(want, abs=1e-7)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(coord, coord), min_size=2, max_size=7), st.tuples(coord, coord),
       st.floats(0.5, 40))
def test_chord_additive_along_polyline(pts, center, r):
    whole = sum(chord_length(pts[k], pts[k + 1], center, r) for k in range(len(pts) - 1))
    split = 0.0
    for k in range(len(pts) - 1):
        a, b = pts[k], pts[k + 1]
        m = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        split += chord_length(a, m, center, r) + chord_length(m, b, center, r)
    assert whole == pytest.approx(split, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(coord, coord), min_size=2, max_size=7), st.floats(0, 300))
def test_dead_zone_length_law(pts, dead):
    path = Polyline(pts)
    cut = truncate_dead_zone(path, dead)
    assert cut.length == pytest.approx(max(0.0, path.length - dead), abs=1e-7)
    if cut.length > 0 and len(cut) >= 2:
        # the prefix follows the original route
        assert np.allclose(cut.points[:-1], path.points[:len(cut) - 1])


SOLVERS = [("greedy", {}), ("grasp", {"alpha": 0.3}), ("hc", {}), ("ea", {}), ("umda", {"alpha": 0.2})]


@pytest.mark.parametrize("name, params", SOLVERS)
@pytest.mark.parametrize("seed", [0, 3])
def test_trace_monotone_and_reproducible(name, params, seed):
    inst = instance(seed)
    budget = Budget.eval_count(6000)
    a = run_solver(name, inst, 4, budget, seed + 17, **params)
    b = run_solver(name, inst, 4, budget, seed + 17, **params)
    ws = [e.best_w for e in a.events]
    assert ws and all(x > y for x, y in zip(ws, ws[1:]))
    assert [e.evals for e in a.events] == sorted(e.evals for e in a.events)
    assert a.final.value == ws[-1] <= ws[0]
    assert a.final == b.final
    assert [(e.evals, e.best_w) for e in a.events] == [(e.evals, e.best_w) for e in b.events]
    assert a.evals == b.evals
