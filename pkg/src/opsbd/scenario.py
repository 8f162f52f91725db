"""Scenario data model, validation and the JSON scenario file format.

A scenario is a rectangular grid of square cells.  Cells are addressed
with 1-based ``(row, col)`` pairs, row 1 being the top row of the text
grid.  Grid alphabet::

    .  unblocked        #  blocked
    E  entrance         O  objective

Entrances and objectives are indexed in row-major grid order; the
attacker's path probabilities ``gamma`` are an entrances x objectives
matrix in that order (or the string ``"uniform"``).
"""

import json
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np
from scipy import ndimage

UNBLOCKED = "."
BLOCKED = "#"
ENTRANCE = "E"
OBJECTIVE = "O"
CELL_KINDS = (UNBLOCKED, BLOCKED, ENTRANCE, OBJECTIVE)

GAMMA_TOL = 1e-9

DEFAULT_ETA = 0.06
DEFAULT_THETA = 0.6
DEFAULT_SPEED = 1.0
DEFAULT_NEUTRALIZE = 10.0


class ScenarioError(ValueError):
    """Raised for documents that cannot be turned into a Scenario."""


class CellRef(NamedTuple):
    row: int
    col: int


class Objective(NamedTuple):
    row: int
    col: int
    casualties: float

    @property
    def cell(self):
        return CellRef(self.row, self.col)


@dataclass(frozen=True)
class Params:
    """Detection and attack physics.

    ``radius`` (detection radius in meters) has no default; it may come
    from the scenario file or be supplied later via
    :meth:`Scenario.with_radius`.
    """

    eta: float = DEFAULT_ETA
    theta: float = DEFAULT_THETA
    radius: Optional[float] = None
    speed: float = DEFAULT_SPEED
    neutralize_time: float = DEFAULT_NEUTRALIZE

    @property
    def dead_length(self):
        """Arc length before the objective where detection comes too late."""
        return self.speed * self.neutralize_time


@dataclass(frozen=True)
class Scenario:
    rows: int
    cols: int
    cell_size: float
    grid: tuple
    objectives: tuple
    entrances: tuple
    gamma: Optional[tuple] = None  # None means uniform
    params: Params = field(default_factory=Params)
    name: str = "scenario"

    @property
    def epsilon(self):
        return len(self.entrances)

    @property
    def phi(self):
        return len(self.objectives)

    @property
    def n_paths(self):
        return self.epsilon * self.phi

    @property
    def uniform_gamma(self):
        return self.gamma is None

    def kind(self, cell):
        return self.grid[cell[0] - 1][cell[1] - 1]

    def in_grid(self, cell):
        return 1 <= cell[0] <= self.rows and 1 <= cell[1] <= self.cols

    def is_blocked(self, cell):
        return self.kind(cell) == BLOCKED

    def blocked_mask(self):
        """``uint8`` array of shape (rows, cols), 1 where blocked."""
        return np.array([[ch == BLOCKED for ch in line] for line in self.grid], dtype=np.uint8)

    def unblocked_cells(self):
        return [CellRef(i + 1, j + 1)
                for i, line in enumerate(self.grid)
                for j, ch in enumerate(line) if ch != BLOCKED]

    def flat_index(self, cell):
        """0-based row-major index of a 1-based cell."""
        return (cell[0] - 1) * self.cols + (cell[1] - 1)

    def cell_at(self, flat):
        r, c = divmod(int(flat), self.cols)
        return CellRef(r + 1, c + 1)

    def gamma_matrix(self):
        if self.gamma is None:
            k = self.n_paths
            return np.full((self.epsilon, self.phi), 1.0 / k if k else 0.0)
        return np.array(self.gamma, dtype=np.float64).reshape(self.epsilon, self.phi)

    def path_probabilities(self):
        """gamma flattened in path order ``p = i * phi + j``."""
        return self.gamma_matrix().reshape(-1)

    def casualties(self):
        return np.array([o.casualties for o in self.objectives], dtype=np.float64)

    def with_radius(self, radius):
        return replace(self, params=replace(self.params, radius=float(radius)))

    def with_params(self, **changes):
        return replace(self, params=replace(self.params, **changes))


def _cell_key(cell):
    return (cell[0], cell[1])


def _require(doc, key):
    if key not in doc:
        raise ScenarioError(f"missing key {key!r}")
    return doc[key]


def _as_int(value, what):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ScenarioError(f"{what} must be an integer, got {value!r}")
    return int(value)


def _as_float(value, what):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{what} must be a number, got {value!r}")
    return float(value)


def parse_scenario(document):
    """Build a Scenario from a JSON string (or an already-decoded dict)."""
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"malformed document: {exc}") from None
    else:
        doc = document
    if not isinstance(doc, dict):
        raise ScenarioError("malformed document: top level must be an object")

    rows = _as_int(_require(doc, "rows"), "rows")
    cols = _as_int(_require(doc, "cols"), "cols")
    if rows < 1 or cols < 1:
        raise ScenarioError("rows and cols must be >= 1")
    cell_size = _as_float(_require(doc, "cell_size_m"), "cell_size_m")

    grid = _require(doc, "grid")
    if not isinstance(grid, list) or not all(isinstance(line, str) for line in grid):
        raise ScenarioError("grid must be a list of strings")
    if len(grid) != rows:
        raise ScenarioError(f"grid has {len(grid)} rows, expected {rows}")
    for i, line in enumerate(grid, start=1):
        if len(line) != cols:
            raise ScenarioError(f"grid row {i} has length {len(line)}, expected {cols}")
        bad = set(line) - set(CELL_KINDS)
        if bad:
            raise ScenarioError(f"unknown cell character(s) {sorted(bad)} in grid row {i}")

    entrances = tuple(CellRef(i + 1, j + 1)
                      for i, line in enumerate(grid)
                      for j, ch in enumerate(line) if ch == ENTRANCE)
    marked = [CellRef(i + 1, j + 1)
              for i, line in enumerate(grid)
              for j, ch in enumerate(line) if ch == OBJECTIVE]

    entries = _require(doc, "objectives")
    if not isinstance(entries, list):
        raise ScenarioError("objectives must be a list")
    by_cell = {}
    for entry in entries:
        if not isinstance(entry, dict):
            raise ScenarioError("objective entries must be objects")
        cell = CellRef(_as_int(_require(entry, "row"), "objective row"),
                       _as_int(_require(entry, "col"), "objective col"))
        if cell in by_cell:
            raise ScenarioError(f"duplicate objective coordinates {tuple(cell)}")
        by_cell[cell] = _as_float(_require(entry, "casualties"), "casualties")
    for cell in marked:
        if cell not in by_cell:
            raise ScenarioError(f"objective at {tuple(cell)} has no casualty entry")
    for cell in by_cell:
        if cell not in set(marked):
            raise ScenarioError(f"objective entry {tuple(cell)} is not marked 'O' in the grid")
    if not marked:
        raise ScenarioError("no objectives")
    if not entrances:
        raise ScenarioError("no entrances")
    objectives = tuple(Objective(c.row, c.col, by_cell[c]) for c in marked)

    gamma_doc = doc.get("gamma", "uniform")
    if gamma_doc == "uniform":
        gamma = None
    else:
        if (not isinstance(gamma_doc, list) or len(gamma_doc) != len(entrances)
                or not all(isinstance(row, list) and len(row) == len(objectives) for row in gamma_doc)):
            raise ScenarioError(
                f"gamma must be 'uniform' or a {len(entrances)}x{len(objectives)} nested list")
        gamma = tuple(tuple(_as_float(v, "gamma entry") for v in row) for row in gamma_doc)
        total = math.fsum(v for row in gamma for v in row)
        if abs(total - 1.0) > GAMMA_TOL:
            raise ScenarioError(f"gamma not normalized (sums to {total!r})")
        if any(v < 0 for row in gamma for v in row):
            raise ScenarioError("gamma has negative entries")

    pdoc = doc.get("params", {}) or {}
    if not isinstance(pdoc, dict):
        raise ScenarioError("params must be an object")
    known = {"eta", "theta", "radius_m", "speed_mps", "neutralize_s"}
    unknown = set(pdoc) - known
    if unknown:
        raise ScenarioError(f"unknown params {sorted(unknown)}")
    radius = pdoc.get("radius_m")
    params = Params(
        eta=_as_float(pdoc.get("eta", DEFAULT_ETA), "eta"),
        theta=_as_float(pdoc.get("theta", DEFAULT_THETA), "theta"),
        radius=None if radius is None else _as_float(radius, "radius_m"),
        speed=_as_float(pdoc.get("speed_mps", DEFAULT_SPEED), "speed_mps"),
        neutralize_time=_as_float(pdoc.get("neutralize_s", DEFAULT_NEUTRALIZE), "neutralize_s"),
    )
    return Scenario(rows=rows, cols=cols, cell_size=cell_size, grid=tuple(grid),
                    objectives=objectives, entrances=entrances, gamma=gamma,
                    params=params, name=str(doc.get("name", "scenario")))


def scenario_to_dict(s):
    params = {"eta": s.params.eta, "theta": s.params.theta}
    if s.params.radius is not None:
        params["radius_m"] = s.params.radius
    params["speed_mps"] = s.params.speed
    params["neutralize_s"] = s.params.neutralize_time
    return {
        "name": s.name,
        "rows": s.rows,
        "cols": s.cols,
        "cell_size_m": s.cell_size,
        "grid": list(s.grid),
        "objectives": [{"row": o.row, "col": o.col, "casualties": o.casualties}
                       for o in s.objectives],
        "gamma": "uniform" if s.gamma is None else [list(row) for row in s.gamma],
        "params": params,
    }


def write_scenario(s):
    """Serialize to the JSON scenario format (floats keep full precision)."""
    return json.dumps(scenario_to_dict(s), indent=2) + "\n"


def read_scenario(path):
    with open(path) as fh:
        return parse_scenario(fh.read())


def save_scenario(s, path):
    with open(path, "w") as fh:
        fh.write(write_scenario(s))


def reachability_labels(s):
    """Connected components of unblocked cells.

    Two cells are joined by a finite visibility path exactly when they are
    8-connected through unblocked cells: 4-neighbours always see each other
    and a diagonal step only touches the shared corner of the two other
    cells, which never blocks.
    """
    free = s.blocked_mask() == 0
    labels, _ = ndimage.label(free, structure=np.ones((3, 3), dtype=int))
    return labels


def validate_scenario(s):
    """List every invariant violation of ``s`` (empty list when valid)."""
    problems = []
    if s.rows < 1 or s.cols < 1:
        problems.append("grid dimensions must be positive")
        return problems
    if not s.cell_size > 0:
        problems.append("cell size must be positive")
    if len(s.grid) != s.rows or any(len(line) != s.cols for line in s.grid):
        problems.append("grid shape does not match rows x cols")
        return problems
    if any(ch not in CELL_KINDS for line in s.grid for ch in line):
        problems.append("grid contains unknown cell kinds")

    marked_e = [CellRef(i + 1, j + 1) for i, line in enumerate(s.grid)
                for j, ch in enumerate(line) if ch == ENTRANCE]
    marked_o = [CellRef(i + 1, j + 1) for i, line in enumerate(s.grid)
                for j, ch in enumerate(line) if ch == OBJECTIVE]
    if list(map(_cell_key, s.entrances)) != list(map(_cell_key, marked_e)):
        problems.append("entrance list does not match grid markings")
    if [(o.row, o.col) for o in s.objectives] != list(map(_cell_key, marked_o)):
        problems.append("objective list does not match grid markings")
    for cell in list(s.entrances) + [o.cell for o in s.objectives]:
        if not s.in_grid(cell):
            problems.append(f"cell {tuple(cell)} outside the grid")
        elif s.is_blocked(cell):
            problems.append(f"entrance/objective {tuple(cell)} is blocked")
    if not s.entrances:
        problems.append("no entrances")
    if not s.objectives:
        problems.append("no objectives")

    for o in s.objectives:
        if not o.casualties > 0:
            problems.append(f"nonpositive casualties at objective {(o.row, o.col)}")

    if s.gamma is not None:
        g = np.asarray(s.gamma, dtype=np.float64)
        if g.shape != (s.epsilon, s.phi):
            problems.append(f"gamma shape {g.shape} != ({s.epsilon}, {s.phi})")
        else:
            if (g < 0).any():
                problems.append("gamma has negative entries")
            if abs(math.fsum(g.reshape(-1)) - 1.0) > GAMMA_TOL:
                problems.append("gamma not normalized")

    p = s.params
    if not p.eta > 0:
        problems.append("eta must be positive")
    if not 0 <= p.theta <= 1:
        problems.append("theta must lie in [0, 1]")
    if p.radius is not None and not p.radius > 0:
        problems.append("radius must be positive")
    if not p.speed > 0:
        problems.append("speed must be positive")
    if not p.neutralize_time >= 0:
        problems.append("neutralize time must be nonnegative")

    if s.entrances and s.objectives and not any("outside" in m or "blocked" in m for m in problems):
        labels = reachability_labels(s)
        for e in s.entrances:
            for o in s.objectives:
                if labels[e.row - 1, e.col - 1] != labels[o.row - 1, o.col - 1]:
                    problems.append(f"unreachable pair: entrance {tuple(e)} -> objective {(o.row, o.col)}")
    return problems
