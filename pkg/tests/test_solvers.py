import io
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opsbd.objective import evaluate
from opsbd.oracle import exact_best
from opsbd.solvers import (ALGORITHMS, Budget, UnivariateModel, canonical_name,
                           decode_decision_vector, ea_run, grasp_construct, grasp_run, greedy,
                           greedy_run, hc_run, hill_climb, make_rng, read_trace_csv, run_solver,
                           umda_run)
from opsbd.solvers.construct import grasp_positions, _replay
from opsbd.solvers.evolution import _UniformStream

from conftest import make_scenario, tiny_instance

SMALL = Budget.eval_count(4000)


def test_budget_validation():
    with pytest.raises(ValueError):
        Budget()
    with pytest.raises(ValueError):
        Budget(seconds=1, evals=1)
    with pytest.raises(ValueError):
        Budget.eval_count(0)
    assert Budget.eval_count(5).deterministic
    assert not Budget.wall_clock(0.1).deterministic
    with pytest.raises(ValueError):
        make_rng(-1)


def test_names():
    assert canonical_name("GRASP+HC") == "grasp-hc"
    with pytest.raises(ValueError):
        canonical_name("tabu")


def test_greedy_single_detector_is_exact(tiny):
    g = greedy(tiny, 1)
    assert g.value == exact_best(tiny, 1, use_pruning=False).best.value
    assert g.cells == exact_best(tiny, 1, use_pruning=False).best.cells


def test_greedy_takes_dominant_cell_first():
    # one cell on the only path; nothing else comes close
    s = make_scenario(["E.........O"], neutralize_s=0.0)
    from opsbd.objective import Instance
    inst = Instance.build(s, radius=10)
    sol = greedy(inst, 1)
    lam = inst.lam_flat[:, 0]
    assert inst.flat_of(sol.cells)[0] == int(np.argmax(lam))


def test_greedy_vs_exact_gap(fig2_instance):
    g = greedy(fig2_instance, 3)
    opt = exact_best(fig2_instance, 3).best
    assert g.value >= opt.value - 1e-12
    assert g.value <= opt.value * 1.10


def test_grasp_alpha_zero_is_greedy(tiny):
    g = greedy(tiny, 3)
    for seed in range(5):
        sol, x = grasp_construct(tiny, 3, 0.0, seed)
        assert sol.value == g.value
        assert len(x) == 2
    tr = grasp_run(tiny, 3, SMALL, 1, alpha=0.0)
    assert tr.final.value == g.value


def test_grasp_alpha_one_uses_whole_list(tiny):
    space = tiny.space(3)
    sizes = []
    grasp_positions(tiny, space, 1.0, lambda step, size: sizes.append(size) or 0)
    assert sizes == [space.size, space.size - 1, space.size - 2]


def test_grasp_determinism_and_decode_round_trip(tiny):
    for seed in range(6):
        a = grasp_construct(tiny, 4, 0.3, seed)
        b = grasp_construct(tiny, 4, 0.3, seed)
        assert a == b
        sol, x = a
        # the vector replays the first delta-1 picks; the last one is greedy
        rng = make_rng(seed)
        space = tiny.space(4)
        picks = []
        grasp_positions(tiny, space, 0.3, lambda step, size: picks.append(int(rng.integers(size)))
                        or picks[-1])
        pos, _ = grasp_positions(tiny, space, 0.3, _replay(x, 4))
        assert tiny.solution(space.flat[pos]) == decode_decision_vector(tiny, 4, 0.3, x)
        ref, _ = grasp_positions(tiny, space, 0.3, lambda step, size: picks[step] if step < 3 else 0)
        assert pos == ref
        dec = decode_decision_vector(tiny, 4, 0.3, x)
        assert dec.value <= sol.value
        if picks[-1] == 0:
            assert dec == sol
    for seed in range(6):
        sol, x = grasp_construct(tiny, 4, 0.0, seed)
        assert decode_decision_vector(tiny, 4, 0.0, x).value == sol.value


def test_decode_zero_and_clamp(tiny):
    g = greedy(tiny, 4)
    assert decode_decision_vector(tiny, 4, 0.5, [0, 0, 0]) == g
    big = decode_decision_vector(tiny, 4, 0.5, [10 ** 6] * 3)
    assert len(set(big.cells)) == 4
    with pytest.raises(ValueError):
        decode_decision_vector(tiny, 4, 0.5, [0, 0])


def test_grasp_one_construction_budget(tiny):
    tr = grasp_run(tiny, 3, Budget.eval_count(1), 7, alpha=0.4)
    sol, _ = grasp_construct(tiny, 3, 0.4, 7)
    assert tr.final == sol


def local_optimum(inst, cells, delta):
    space = inst.space(delta)
    cand = [tuple(c) for c in inst.cells_of(space.flat)]
    w = evaluate(cells, inst)
    for i in range(delta):
        for c in cand:
            if c in map(tuple, cells):
                continue
            trial = list(cells)
            trial[i] = c
            if evaluate(trial, inst) < w - 1e-12:
                return False
    return True


def test_hill_climb_local_optimum_and_fixed_point(tiny):
    space = tiny.space(3)
    rng = np.random.default_rng(0)
    for _ in range(5):
        start = tiny.cells_of(space.flat[rng.choice(space.size, 3, replace=False)])
        res = hill_climb(tiny, start)
        assert res.value <= evaluate(start, tiny)
        assert local_optimum(tiny, list(res.cells), 3)
        assert hill_climb(tiny, res) == res


def test_hill_climb_rejects_pruned_start(tiny):
    pruned = [f for f in range(64) if tiny.cache.blocked.reshape(-1)[f] == 0
              and f not in set(tiny.space(2).flat.tolist())]
    if pruned:
        with pytest.raises(ValueError):
            hill_climb(tiny, tiny.cells_of([pruned[0], tiny.space(2).flat[0]]))


def test_hc_single_descent_budget(tiny):
    space = tiny.space(3)
    # one start plus one sweep's worth of evaluations
    tr = hc_run(tiny, 3, Budget.eval_count(1), 5)
    rng = make_rng(5)
    start = np.sort(rng.choice(space.size, size=3, replace=False))
    assert tr.final.value == tiny.value_of(space.flat[start])
    full = hc_run(tiny, 3, Budget.eval_count(3 * space.size + 1), 5)
    assert full.final.value <= tr.final.value


def test_ea_static_without_variation(tiny):
    tr = ea_run(tiny, 2, Budget.eval_count(300), 3, pop_size=20, px=0.0, pm=0.0)
    init = ea_run(tiny, 2, Budget.eval_count(20), 3, pop_size=20, px=0.0, pm=0.0)
    assert tr.final == init.final
    assert len(tr.events) == len(init.events)


def test_ea_population_too_large():
    s = make_scenario(["E.O"], neutralize_s=0.0)
    from opsbd.objective import Instance
    inst = Instance.build(s, radius=10)
    with pytest.raises(ValueError):
        ea_run(inst, 1, SMALL, 1, pop_size=100)


def test_uniform_stream_sampling():
    u = _UniformStream(make_rng(1), block=64)
    for n, k in [(5, 5), (10, 3), (100, 4), (3, 1)]:
        for _ in range(50):
            s = u.sample(n, k)
            assert len(set(s)) == k and all(0 <= v < n for v in s)
    counts = np.bincount([u.index(4) for _ in range(20000)], minlength=4)
    assert counts.min() > 4500
    with pytest.raises(ValueError):
        u.sample(2, 3)


def test_univariate_model():
    m = UnivariateModel.fit([[0, 2], [0, 1]], smoothing=0.0)
    assert m.tables[0].tolist() == [1.0]
    assert m.tables[1].tolist() == [0.0, 0.5, 0.5]
    sm = UnivariateModel.fit([[0, 2], [0, 1]], smoothing=0.3)
    assert np.isclose(sm.tables[1].sum(), 1.0) and sm.tables[1][0] > 0
    point = UnivariateModel([[1.0], [1.0]])
    assert np.all(point.sample(make_rng(0), 10) == 0)


def test_point_mass_model_decodes_to_greedy(tiny):
    g = greedy(tiny, 3)
    for x in UnivariateModel([[1.0], [1.0]]).sample(make_rng(2), 5):
        space = tiny.space(3)
        pos, _ = grasp_positions(tiny, space, 0.1, _replay(x, 3))
        assert tiny.solution(space.flat[pos]) == g


@pytest.mark.parametrize("name", ALGORITHMS)
def test_every_solver_valid_and_reproducible(tiny, name):
    a = run_solver(name, tiny, 3, SMALL, 11, alpha=0.2)
    b = run_solver(name, tiny, 3, SMALL, 11, alpha=0.2)
    assert a.final == b.final
    assert [(e.evals, e.best_w) for e in a.events] == [(e.evals, e.best_w) for e in b.events]
    assert a.evals == b.evals
    cells = a.final.cells
    assert len(set(cells)) == 3
    assert a.final.value == evaluate(cells, tiny)
    ws = [e.best_w for e in a.events]
    assert all(x > y for x, y in zip(ws, ws[1:]))
    ts = [e.elapsed for e in a.events]
    assert ts == sorted(ts)
    if name != "greedy":
        assert a.evals <= SMALL.evals + tiny.space(3).size * 3 + 100


def test_wall_clock_budget_respected(tiny):
    for name in ALGORITHMS:
        tr = run_solver(name, tiny, 2, Budget.wall_clock(0.05), 1)
        assert tr.elapsed < 0.5


def test_trace_csv_round_trip(tiny):
    tr = hc_run(tiny, 2, SMALL, 4)
    buf = io.StringIO()
    tr.write_csv(buf)
    assert buf.getvalue().splitlines()[0] == "elapsed_s,evals,best_w"
    back = read_trace_csv(io.StringIO(buf.getvalue()))
    assert len(back) == len(tr.events)
    assert back[-1].best_w == pytest.approx(tr.final.value, rel=1e-11)


def test_umda_validation(tiny):
    with pytest.raises(ValueError):
        umda_run(tiny, 3, SMALL, 1, pop_size=10, select_size=10)
