"""Ground truth for testing: exhaustive search and attack simulation."""

import math
from dataclasses import dataclass

import numpy as np

from .objective import Solution
from .solvers.base import make_rng

DEFAULT_CAP = 10 ** 7


class EnumerationCapError(ValueError):
    """Too many subsets to enumerate."""


@dataclass(frozen=True)
class ExactResult:
    best: Solution
    enumerated: int


def exact_best(instance, delta, use_pruning=True, cap=DEFAULT_CAP):
    """Minimum W over every ``delta``-subset of the pool.

    The pool is the dominance-pruned candidate set, or all unblocked cells
    when ``use_pruning`` is false.  Subsets are visited in lexicographic
    order of row-major indices and only a strictly better value replaces
    the incumbent, so ties go to the lexicographically smallest subset.
    """
    if delta < 1:
        raise ValueError("delta must be >= 1")
    if use_pruning:
        pool = instance.cache.candidate_indices(delta)
    else:
        pool = np.flatnonzero(instance.cache.blocked.reshape(-1) == 0)
    K = len(pool)
    if K < delta:
        raise ValueError(f"pool of {K} cells is smaller than delta={delta}")
    total = math.comb(K, delta)
    if total > cap:
        raise EnumerationCapError(f"C({K}, {delta}) = {total} subsets exceeds cap {cap}")

    lam = instance.lam_flat[pool]
    expo = instance.expo_flat[pool]
    w = instance.weights
    eta = instance.eta
    floor = instance.floor
    theta = instance.theta
    best_val = math.inf
    best = None
    count = 0
    prefix = []

    def visit(start, totals):
        nonlocal best_val, best, count
        depth = len(prefix)
        if depth == delta - 1:
            u = w * np.exp(-eta * totals)
            vals = floor + theta * (expo[start:] @ u)
            count += vals.size
            k = int(np.argmin(vals))
            if vals[k] < best_val:
                best_val = float(vals[k])
                best = prefix + [start + k]
            return
        # leave room for the remaining delta - depth - 1 picks
        for a in range(start, K - (delta - depth) + 1):
            prefix.append(a)
            visit(a + 1, totals + lam[a])
            prefix.pop()

    visit(0, np.zeros(instance.n_paths))
    return ExactResult(instance.solution(pool[best]), count)


@dataclass(frozen=True)
class SimulationResult:
    mean: float
    stderr: float
    trials: int


def monte_carlo_estimate(instance, cells, trials, seed, batch=200_000):
    """Simulate attacks against a placement.

    Each trial draws a path from gamma; every detector independently fires
    with probability ``1 - exp(-eta * covered_length)``; a detection
    neutralizes the attacker with probability theta.  Casualties are the
    objective's C when the attack is not neutralized, else 0.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = make_rng(seed)
    flat = np.array(sorted(instance.flat_of(cells)), dtype=np.int64)
    s = instance.scenario
    probs = s.path_probabilities()
    probs = probs / probs.sum()
    cas = np.tile(s.casualties(), s.epsilon)
    # detection probability per (detector, path)
    pdet = -np.expm1(-instance.eta * instance.lam_flat[flat])
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < trials:
        k = min(batch, trials - done)
        path = rng.choice(probs.size, size=k, p=probs)
        if flat.size:
            fired = (rng.random((k, flat.size)) < pdet[:, path].T).any(axis=1)
        else:
            fired = np.zeros(k, dtype=bool)
        stopped = fired & (rng.random(k) < instance.theta)
        outcome = np.where(stopped, 0.0, cas[path])
        total += float(outcome.sum())
        total_sq += float(np.dot(outcome, outcome))
        done += k
    mean = total / trials
    if trials > 1:
        var = max(total_sq - trials * mean * mean, 0.0) / (trials - 1)
    else:
        var = 0.0
    return SimulationResult(mean, math.sqrt(var / trials), trials)
