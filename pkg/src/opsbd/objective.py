"""Expected-casualty objective and the solver-facing problem instance."""

import json
from dataclasses import dataclass

import numpy as np

from .coverage import build_cache
from .paths import enumerate_paths
from .scenario import CellRef


def baseline_casualties(s):
    """Expected casualties with no detectors: sum of gamma_ij * C_j."""
    g = s.gamma_matrix()
    return float(np.sum(g * s.casualties()[None, :]))


@dataclass(frozen=True)
class Solution:
    cells: tuple
    value: float

    @property
    def size(self):
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)


class SearchSpace:
    """Candidate cells for a given number of detectors, in row-major order.

    ``lam`` and ``expo`` hold the candidates' coverage rows and
    ``exp(-eta * lam)`` so one matrix-vector product evaluates every
    single-cell extension of a partial solution.
    """

    def __init__(self, instance, delta):
        self.delta = delta
        self.flat = instance.cache.candidate_indices(delta)
        if len(self.flat) < delta:
            raise ValueError(f"only {len(self.flat)} candidate cells for {delta} detectors")
        self.lam = np.ascontiguousarray(instance.lam_flat[self.flat])
        self.expo = np.ascontiguousarray(instance.expo_flat[self.flat])
        self.size = len(self.flat)


class Instance:
    """Scenario + paths + coverage cache, with objective evaluation."""

    def __init__(self, scenario, paths, cache):
        self.scenario = scenario
        self.paths = paths
        self.cache = cache
        p = scenario.params
        self.eta = p.eta
        self.theta = p.theta
        gamma = scenario.path_probabilities()
        cas = np.tile(scenario.casualties(), scenario.epsilon)
        self.weights = gamma * cas  # gamma_p * C_p in path order
        self.baseline = baseline_casualties(scenario)
        self.floor = (1.0 - self.theta) * self.baseline
        m, n, r = cache.lam.shape
        self.lam_flat = cache.lam.reshape(m * n, r)
        self.expo_flat = np.exp(-self.eta * self.lam_flat)
        self._spaces = {}

    @classmethod
    def build(cls, scenario, radius=None):
        if radius is not None:
            scenario = scenario.with_radius(radius)
        paths = enumerate_paths(scenario)
        return cls(scenario, paths, build_cache(scenario, paths))

    @property
    def n_paths(self):
        return len(self.weights)

    def space(self, delta):
        if delta not in self._spaces:
            self._spaces[delta] = SearchSpace(self, delta)
        return self._spaces[delta]

    def flat_of(self, cells):
        s = self.scenario
        out = []
        for c in cells:
            c = CellRef(int(c[0]), int(c[1]))
            if not s.in_grid(c):
                raise ValueError(f"cell {tuple(c)} outside the grid")
            if s.is_blocked(c):
                raise ValueError(f"cell {tuple(c)} is blocked")
            out.append(s.flat_index(c))
        return out

    def cells_of(self, flat):
        return tuple(self.scenario.cell_at(f) for f in sorted(int(x) for x in flat))

    def totals(self, flat):
        """Per-path covered length summed over cells (row-major order)."""
        idx = np.sort(np.asarray(flat, dtype=np.int64))
        if idx.size == 0:
            return np.zeros(self.n_paths)
        return self.lam_flat[idx].sum(axis=0)

    def value_of_totals(self, totals):
        return self.floor + self.theta * float(np.dot(self.weights, np.exp(-self.eta * totals)))

    def value_of(self, flat):
        return self.value_of_totals(self.totals(flat))

    def solution(self, flat):
        return Solution(self.cells_of(flat), self.value_of(flat))


def evaluate(cells, instance):
    """Expected casualties W of a detector placement.

    Detectors act independently, so covered lengths simply add up even
    where detection disks overlap.
    """
    flat = instance.flat_of(cells)
    if len(set(flat)) != len(flat):
        raise ValueError("duplicate detector cells")
    return instance.value_of(flat)


def evaluate_swap(sol, out_cell, in_cell, totals, instance):
    """Value of ``sol - {out_cell} + {in_cell}`` from running per-path totals.

    Returns ``(W, new_totals)``.
    """
    members = {tuple(c) for c in sol}
    if tuple(out_cell) not in members:
        raise ValueError("out_cell is not part of the solution")
    if tuple(in_cell) in members:
        raise ValueError("in_cell is already part of the solution")
    fo, fi = instance.flat_of([out_cell, in_cell])
    new = totals - instance.lam_flat[fo] + instance.lam_flat[fi]
    return instance.value_of_totals(new), new


def solution_to_dict(sol, delta=None, scenario_name=None, algorithm=None, seed=None, radius=None):
    doc = {
        "detectors": [{"row": c.row, "col": c.col} for c in sol.cells],
        "value": sol.value,
        "delta": len(sol.cells) if delta is None else delta,
        "scenario_name": scenario_name,
        "algorithm": algorithm,
        "seed": seed,
    }
    if radius is not None:
        doc["radius_m"] = radius
    return doc


def write_solution(path, sol, **meta):
    with open(path, "w") as fh:
        json.dump(solution_to_dict(sol, **meta), fh, indent=2)
        fh.write("\n")


def read_solution(path):
    """Return ``(Solution, metadata dict)`` from a solution file."""
    with open(path) as fh:
        doc = json.load(fh)
    cells = tuple(sorted(CellRef(int(d["row"]), int(d["col"])) for d in doc["detectors"]))
    meta = {k: v for k, v in doc.items() if k not in ("detectors", "value")}
    return Solution(cells, float(doc["value"])), meta
