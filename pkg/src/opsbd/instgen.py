"""Seeded random scenario generator.

Casualties use ``C_j = kappa * rho_j`` where ``rho_j`` is a crowd density
drawn from Normal(density_mean, density_sd) persons/m^2, resampled until
it is at least ``MIN_DENSITY``, and ``kappa`` is a lethal-area constant in
square meters.
"""

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .scenario import (BLOCKED, ENTRANCE, OBJECTIVE, UNBLOCKED, CellRef, Objective,
                       Params, Scenario, reachability_labels)

BENCHMARK_GRID = {
    "rows": (32, 64, 128),
    "cols": (32, 64, 128),
    "cell_size": (5.0, 10.0, 20.0),
    "entrances_per_side": (2, 3, 4),
    "objectives": (2, 4, 6, 8),
    "blocked_fraction": (0.025, 0.05, 0.10),
    "radius": (10.0, 20.0, 40.0),
}

MIN_DENSITY = 0.05


class GenerationError(RuntimeError):
    """Parameters too constrained to produce a connected scenario."""


@dataclass(frozen=True)
class GenParams:
    rows: int = 32
    cols: int = 32
    cell_size: float = 10.0
    entrances_per_side: int = 2
    objectives: int = 4
    blocked_fraction: float = 0.05
    radius: float = 20.0
    casualty_scale: float = 100.0
    density_mean: float = 0.4
    density_sd: float = 0.1
    seed: int = 0
    benchmark_grid: bool = False
    max_retries: int = 200

    @classmethod
    def from_dict(cls, doc):
        names = {f.name for f in fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise ValueError(f"unknown generator parameters {sorted(unknown)}")
        return cls(**doc)

    def to_dict(self):
        return asdict(self)

    def check(self):
        if self.benchmark_grid:
            for key, allowed in BENCHMARK_GRID.items():
                value = getattr(self, key)
                if not any(math.isclose(value, a) for a in allowed):
                    raise ValueError(f"{key}={value!r} outside the benchmark grid {allowed}")
        if self.rows < 3 or self.cols < 3:
            raise ValueError("grid needs at least 3 x 3 cells (interior for objectives)")
        for key in ("cell_size", "radius", "casualty_scale", "density_mean"):
            if not getattr(self, key) > 0:
                raise ValueError(f"{key} must be positive")
        if self.entrances_per_side < 1 or self.objectives < 1:
            raise ValueError("need at least one entrance per side and one objective")
        if not 0 <= self.blocked_fraction < 1:
            raise ValueError("blocked_fraction must lie in [0, 1)")
        if self.density_sd < 0:
            raise ValueError("density_sd must be nonnegative")
        if self.entrances_per_side > min(self.rows, self.cols):
            raise ValueError("more entrances per side than border cells")
        if self.objectives > (self.rows - 2) * (self.cols - 2):
            raise ValueError("more objectives than interior cells")

    @property
    def n_blocked(self):
        return math.floor(self.blocked_fraction * self.rows * self.cols + 1e-9)


def _side_cells(m, n):
    top = [(0, c) for c in range(n)]
    right = [(r, n - 1) for r in range(m)]
    bottom = [(m - 1, c) for c in range(n)]
    left = [(r, 0) for r in range(m)]
    return top, right, bottom, left


def generate_instance(p):
    """Draw a scenario from ``p``; the same parameters give the same scenario."""
    p.check()
    rng = np.random.default_rng(p.seed)
    m, n = p.rows, p.cols

    used = set()
    for side in _side_cells(m, n):
        free = [cell for cell in side if cell not in used]
        if len(free) < p.entrances_per_side:
            raise GenerationError("not enough free border cells for entrances")
        for k in rng.choice(len(free), size=p.entrances_per_side, replace=False):
            used.add(free[int(k)])
    entrances = sorted(used)

    interior = [(r, c) for r in range(1, m - 1) for c in range(1, n - 1)]
    objectives = sorted(interior[int(k)] for k in rng.choice(len(interior), size=p.objectives, replace=False))

    densities = []
    while len(densities) < p.objectives:
        rho = float(rng.normal(p.density_mean, p.density_sd))
        if rho >= MIN_DENSITY:
            densities.append(rho)
    casualties = [p.casualty_scale * rho for rho in densities]

    special = set(entrances) | set(objectives)
    pool = [(r, c) for r in range(m) for c in range(n) if (r, c) not in special]
    if p.n_blocked > len(pool):
        raise GenerationError("more blocked cells than free cells")
    base = [[UNBLOCKED] * n for _ in range(m)]
    for r, c in entrances:
        base[r][c] = ENTRANCE
    for r, c in objectives:
        base[r][c] = OBJECTIVE
    params = Params(radius=float(p.radius))
    objs = tuple(Objective(r + 1, c + 1, cas) for (r, c), cas in zip(objectives, casualties))
    ents = tuple(CellRef(r + 1, c + 1) for r, c in entrances)
    name = f"gen{m}x{n}-s{p.seed}"

    for _ in range(p.max_retries):
        grid = [row[:] for row in base]
        for k in rng.choice(len(pool), size=p.n_blocked, replace=False):
            r, c = pool[int(k)]
            grid[r][c] = BLOCKED
        s = Scenario(rows=m, cols=n, cell_size=float(p.cell_size),
                     grid=tuple("".join(row) for row in grid),
                     objectives=objs, entrances=ents, gamma=None, params=params, name=name)
        labels = reachability_labels(s)
        comps = {labels[r, c] for r, c in special}
        if len(comps) == 1:
            return s
    raise GenerationError(f"no connected layout after {p.max_retries} attempts")
