"""Swap-neighbourhood hill climbing."""

import numpy as np

from .base import Run, make_rng


def descend(instance, space, positions, run=None):
    """First-improvement descent over single-detector replacements.

    For each detector slot in turn, candidates outside the solution are
    tried in row-major order and an improving replacement is taken as soon
    as it is found; later candidates are then compared against the updated
    solution.  Within one slot that sequence ends on the first candidate
    with the lowest value, so a slot is resolved with one vectorized pass.

    Sweeps repeat until one makes no move.  With a ``run`` the budget is
    checked before every slot and an EvalCount budget may cut a slot's scan
    short.  Returns the final positions.
    """
    pos = [int(p) for p in positions]
    delta = len(pos)
    in_sol = np.zeros(space.size, dtype=bool)
    in_sol[pos] = True
    totals = space.lam[pos].sum(axis=0)
    last_sweep = instance.value_of(space.flat[pos])
    while True:
        moved = False
        for i in range(delta):
            if run is not None and run.exhausted():
                return pos
            out = pos[i]
            rest = totals - space.lam[out]
            u = instance.weights * np.exp(-instance.eta * rest)
            vals = instance.floor + instance.theta * (space.expo @ u)
            scan = np.flatnonzero(~in_sol)
            if run is not None:
                left = run.remaining_evals()
                if left is not None and left < scan.size:
                    scan = scan[:left]
                run.charge(scan.size)
            if scan.size == 0:
                continue
            k = int(np.argmin(vals[scan]))
            if vals[scan[k]] < vals[out]:
                new = int(scan[k])
                in_sol[out] = False
                in_sol[new] = True
                pos[i] = new
                totals = space.lam[pos].sum(axis=0)
                moved = True
                if run is not None:
                    run.offer(pos)
        if not moved:
            return pos
        now = instance.value_of(space.flat[pos])
        if not now < last_sweep:  # guards against rounding-level cycles
            return pos
        last_sweep = now


def hill_climb(instance, start):
    """Descend from ``start`` (a Solution or cell list) to a swap-local optimum."""
    cells = list(start.cells if hasattr(start, "cells") else start)
    delta = len(cells)
    space = instance.space(delta)
    flat = np.array(sorted(instance.flat_of(cells)), dtype=np.int64)
    pos = np.searchsorted(space.flat, flat)
    if np.any(pos >= space.size) or np.any(space.flat[np.minimum(pos, space.size - 1)] != flat):
        raise ValueError("start contains cells outside the candidate set")
    if len(set(pos.tolist())) != delta:
        raise ValueError("start contains duplicate cells")
    final = descend(instance, space, pos.tolist())
    return instance.solution(space.flat[final])


def hc_run(instance, delta, budget, seed):
    """Random-restart hill climbing until the budget is spent."""
    run = Run(instance, delta, budget, algorithm="hc", seed=seed)
    rng = make_rng(seed)
    K = run.space.size
    first = True
    while first or not run.exhausted():
        first = False
        start = np.sort(rng.choice(K, size=delta, replace=False)).tolist()
        run.charge(1)
        run.offer(start)
        descend(instance, run.space, start, run)
    return run.trace()
