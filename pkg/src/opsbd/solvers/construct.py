"""Constructive placement: greedy, GRASP and decision-vector decoding.

Positions below are indexes into the row-major candidate array of the
instance's search space; ties between equal values always resolve to the
smaller position (smaller row-major cell index).
"""

import numpy as np

from .base import Run, make_rng
from .local import descend


def extension_values(instance, space, totals):
    """W of ``partial + {c}`` for every candidate ``c``."""
    u = instance.weights * np.exp(-instance.eta * totals)
    return instance.floor + instance.theta * (space.expo @ u)


def greedy_positions(instance, space, run=None):
    avail = np.ones(space.size, dtype=bool)
    totals = np.zeros(instance.n_paths)
    chosen = []
    for _ in range(space.delta):
        vals = extension_values(instance, space, totals)
        idx = np.flatnonzero(avail)
        if run is not None:
            run.charge(idx.size)
        best = idx[int(np.argmin(vals[idx]))]
        chosen.append(int(best))
        avail[best] = False
        totals = totals + space.lam[best]
    return chosen


def grasp_positions(instance, space, alpha, choose, run=None, interruptible=False):
    """One GRASP construction.

    ``choose(step, rcl_size)`` returns the rank to take from the restricted
    candidate list sorted by ascending value.  Returns ``(positions,
    ranks)`` with the ranks of the first ``delta - 1`` steps, or
    ``(None, None)`` when ``interruptible`` and the budget runs out.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    delta = space.delta
    avail = np.ones(space.size, dtype=bool)
    totals = np.zeros(instance.n_paths)
    chosen = []
    ranks = []
    for step in range(delta):
        if interruptible and run.exhausted():
            return None, None
        idx = np.flatnonzero(avail)
        if idx.size == 0:
            raise ValueError("empty candidate pool")
        vals = extension_values(instance, space, totals)[idx]
        if run is not None:
            run.charge(idx.size)
        lo = vals.min()
        hi = vals.max()
        mu = lo + alpha * (hi - lo)
        keep = vals <= mu
        rcl = idx[keep][np.argsort(vals[keep], kind="stable")]
        rank = int(choose(step, rcl.size))
        if step < delta - 1:
            ranks.append(rank)
        pick = int(rcl[rank])
        chosen.append(pick)
        avail[pick] = False
        totals = totals + space.lam[pick]
    return chosen, ranks


def _uniform_choice(rng):
    return lambda step, size: rng.integers(size)


def _replay(x, delta):
    def choose(step, size):
        if step >= delta - 1:
            return 0
        return min(int(x[step]), size - 1)
    return choose


def greedy(instance, delta):
    """Place detectors one at a time, each minimizing the extended W."""
    space = instance.space(delta)
    return instance.solution(space.flat[greedy_positions(instance, space)])


def greedy_run(instance, delta, budget=None, seed=None):
    run = Run(instance, delta, budget, algorithm="greedy", seed=seed)
    run.offer(greedy_positions(instance, run.space, run))
    return run.trace()


def grasp_construct(instance, delta, alpha, rng):
    """Randomized greedy construction; returns ``(Solution, decision vector)``."""
    if not isinstance(rng, np.random.Generator):
        rng = make_rng(rng)
    space = instance.space(delta)
    pos, ranks = grasp_positions(instance, space, alpha, _uniform_choice(rng))
    return instance.solution(space.flat[pos]), ranks


def decode_decision_vector(instance, delta, alpha, x):
    """Replay a GRASP construction from RCL ranks.

    Step ``i < delta - 1`` takes rank ``min(x[i], |RCL| - 1)``; the last
    detector always takes the best extension.  The zero vector reproduces
    :func:`greedy`.
    """
    if len(x) != max(delta - 1, 0):
        raise ValueError(f"decision vector needs {delta - 1} entries")
    if any(int(v) < 0 for v in x):
        raise ValueError("decision vector entries must be nonnegative")
    space = instance.space(delta)
    pos, _ = grasp_positions(instance, space, alpha, _replay(x, delta))
    return instance.solution(space.flat[pos])


def grasp_run(instance, delta, budget, seed, alpha=0.1, local_search=False):
    """Repeated GRASP constructions (optionally each followed by hill
    climbing) until the budget is spent.  The first construction always
    completes."""
    name = "grasp-hc" if local_search else "grasp"
    run = Run(instance, delta, budget, algorithm=name, seed=seed)
    rng = make_rng(seed)
    choose = _uniform_choice(rng)
    first = True
    while first or not run.exhausted():
        pos, _ = grasp_positions(instance, run.space, alpha, choose, run, interruptible=not first)
        if pos is None:
            break
        first = False
        run.offer(pos)
        if local_search:
            descend(instance, run.space, sorted(pos), run)
    return run.trace()
