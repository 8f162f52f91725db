"""Budgets, run traces and the bookkeeping shared by all solvers."""

import csv
import time
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from ..objective import Solution


@dataclass(frozen=True)
class Budget:
    """Wall-clock seconds or a maximum number of objective evaluations."""

    seconds: Optional[float] = None
    evals: Optional[int] = None

    def __post_init__(self):
        if (self.seconds is None) == (self.evals is None):
            raise ValueError("give exactly one of seconds or evals")
        if self.seconds is not None and not self.seconds > 0:
            raise ValueError("time budget must be positive")
        if self.evals is not None and not self.evals > 0:
            raise ValueError("evaluation budget must be positive")

    @classmethod
    def wall_clock(cls, seconds):
        return cls(seconds=float(seconds))

    @classmethod
    def eval_count(cls, evals):
        return cls(evals=int(evals))

    @property
    def deterministic(self):
        return self.evals is not None


class TraceEvent(NamedTuple):
    elapsed: float
    evals: int
    best_w: float


@dataclass
class RunTrace:
    events: list = field(default_factory=list)
    final: Optional[Solution] = None
    algorithm: str = ""
    seed: Optional[int] = None
    evals: int = 0
    elapsed: float = 0.0

    @property
    def best_value(self):
        return self.final.value if self.final is not None else float("inf")

    def time_to_reach(self, target):
        """First elapsed time with ``best_w <= target`` (inf if never)."""
        for ev in self.events:
            if ev.best_w <= target:
                return ev.elapsed
        return float("inf")

    def write_csv(self, fh):
        writer = csv.writer(fh)
        writer.writerow(["elapsed_s", "evals", "best_w"])
        for ev in self.events:
            writer.writerow([f"{ev.elapsed:.12g}", ev.evals, f"{ev.best_w:.12g}"])


def read_trace_csv(fh):
    reader = csv.reader(fh)
    header = [h.strip() for h in next(reader)]
    if header != ["elapsed_s", "evals", "best_w"]:
        raise ValueError(f"unexpected trace header {header}")
    return [TraceEvent(float(a), int(b), float(c)) for a, b, c in reader]


def make_rng(seed):
    """PCG64 generator; seeds are 64-bit unsigned integers."""
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.PCG64(seed))


class Run:
    """Evaluation counter, budget clock and best-so-far tracker."""

    def __init__(self, instance, delta, budget=None, algorithm="", seed=None):
        self.instance = instance
        self.space = instance.space(delta)
        self.delta = delta
        self.budget = budget
        self.algorithm = algorithm
        self.seed = seed
        self.evals = 0
        self.best_value = float("inf")
        self.best_flat = None
        self.events = []
        self.start = time.perf_counter()

    def elapsed(self):
        return time.perf_counter() - self.start

    def charge(self, k):
        self.evals += int(k)

    def exhausted(self):
        b = self.budget
        if b is None:
            return False
        if b.evals is not None:
            return self.evals >= b.evals
        return self.elapsed() >= b.seconds

    def remaining_evals(self):
        """Evaluations left under an EvalCount budget (None otherwise)."""
        if self.budget is None or self.budget.evals is None:
            return None
        return max(self.budget.evals - self.evals, 0)

    def offer(self, positions, value=None):
        """Record a complete solution given as candidate positions."""
        flat = self.space.flat[np.asarray(positions, dtype=np.int64)]
        if value is None:
            value = self.instance.value_of(flat)
        if value < self.best_value:
            self.best_value = value
            self.best_flat = np.sort(flat)
            self.events.append(TraceEvent(self.elapsed(), self.evals, value))
        return value

    def trace(self):
        final = None
        if self.best_flat is not None:
            final = Solution(self.instance.cells_of(self.best_flat), self.best_value)
        return RunTrace(events=list(self.events), final=final, algorithm=self.algorithm,
                        seed=self.seed, evals=self.evals, elapsed=self.elapsed())
