"""Entrance -> objective shortest paths on the cell-center visibility graph."""

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geometry import GEOM_TOL, Polyline, cell_center, truncate_dead_zone
from .scenario import CellRef


class UnreachableError(ValueError):
    """An entrance cannot reach an objective."""


class VisibilityGraph:
    """Complete graph over unblocked cells with line-of-sight edge weights.

    Edges are evaluated on demand; a missing line of sight is an infinite
    weight.  Shortest paths are found with A* under the Euclidean
    heuristic, which is consistent for these weights, so distances equal
    those of Dijkstra on the dense graph.
    """

    def __init__(self, s):
        self.rows = s.rows
        self.cols = s.cols
        self.cell_size = float(s.cell_size)
        self.blocked = np.ascontiguousarray(s.blocked_mask())

    def __contains__(self, cell):
        return (1 <= cell[0] <= self.rows and 1 <= cell[1] <= self.cols
                and not self.blocked[cell[0] - 1, cell[1] - 1])

    @property
    def vertices(self):
        r, c = np.nonzero(self.blocked == 0)
        return [CellRef(int(i) + 1, int(j) + 1) for i, j in zip(r, c)]

    def weight(self, a, b):
        if a not in self or b not in self:
            return math.inf
        if tuple(a) == tuple(b):
            return 0.0
        visible = _kernels.los_batch(self.blocked, a[0] - 1, a[1] - 1,
                                     np.array([b[0] - 1]), np.array([b[1] - 1]),
                                     GEOM_TOL / self.cell_size)[0]
        if not visible:
            return math.inf
        di = a[0] - b[0]
        dj = a[1] - b[1]
        return self.cell_size * math.sqrt(di * di + dj * dj)

    def neighbors(self, a):
        """All cells visible from ``a`` with their edge weights."""
        r, c = np.nonzero(self.blocked == 0)
        keep = ~((r == a[0] - 1) & (c == a[1] - 1))
        r, c = r[keep], c[keep]
        vis = _kernels.los_batch(self.blocked, a[0] - 1, a[1] - 1, r, c,
                                 GEOM_TOL / self.cell_size)
        di = (r[vis] - (a[0] - 1)).astype(np.float64)
        dj = (c[vis] - (a[1] - 1)).astype(np.float64)
        w = self.cell_size * np.sqrt(di * di + dj * dj)
        return {CellRef(int(i) + 1, int(j) + 1): float(x) for i, j, x in zip(r[vis], c[vis], w)}

    def cell_path(self, start, goal):
        """Cells visited by the shortest path, or None if unreachable."""
        if start not in self or goal not in self:
            raise ValueError("path endpoints must be unblocked cells")
        n = self.cols
        src = (start[0] - 1) * n + (start[1] - 1)
        dst = (goal[0] - 1) * n + (goal[1] - 1)
        flat = _kernels.astar(self.blocked, self.cell_size, src, dst, GEOM_TOL)
        if flat is None:
            return None
        return _drop_collinear([CellRef(f // n + 1, f % n + 1) for f in flat])


def _drop_collinear(cells):
    # equal-cost ties may route through cells lying on a straight leg; the
    # merged leg is the same segment, so it stays clear
    out = cells[:1]
    for k in range(1, len(cells) - 1):
        a, b, c = out[-1], cells[k], cells[k + 1]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        forward = (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1])
        if cross != 0 or forward <= 0:
            out.append(b)
    if len(cells) > 1:
        out.append(cells[-1])
    return out


def build_graph(s):
    return VisibilityGraph(s)


def shortest_path(g, start, goal):
    """Minimum-weight polyline between two cell centers.

    Unreachable goals give :meth:`Polyline.unreachable` (infinite length).
    Among equal-cost alternatives the predecessor with the smaller
    row-major index wins, which makes the result deterministic.
    """
    cells = g.cell_path(start, goal)
    if cells is None:
        return Polyline.unreachable()
    return Polyline([cell_center(c, g.cell_size) for c in cells])


@dataclass(frozen=True)
class PathRecord:
    entrance_index: int
    objective_index: int
    cells: tuple
    polyline: Polyline
    truncated: Polyline

    @property
    def length(self):
        return self.polyline.length


class PathSet:
    """The ``epsilon * phi`` paths in canonical order ``p = i * phi + j``."""

    def __init__(self, records, phi, dead_length):
        self.paths = tuple(records)
        self.phi = phi
        self.dead_length = dead_length

    def __len__(self):
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    def __getitem__(self, p):
        return self.paths[p]

    def index(self, i, j):
        return i * self.phi + j

    def lengths(self):
        return np.array([rec.length for rec in self.paths])

    def truncated_lengths(self):
        return np.array([rec.truncated.length for rec in self.paths])


def enumerate_paths(s, graph=None):
    """Compute every entrance -> objective path and its dead-zone truncation."""
    g = graph or build_graph(s)
    dead = s.params.dead_length
    records = []
    for i, e in enumerate(s.entrances):
        for j, o in enumerate(s.objectives):
            cells = g.cell_path(e, o.cell)
            if cells is None:
                raise UnreachableError(f"entrance {tuple(e)} cannot reach objective {(o.row, o.col)}")
            line = Polyline([cell_center(c, s.cell_size) for c in cells])
            records.append(PathRecord(i, j, tuple(cells), line, truncate_dead_zone(line, dead)))
    return PathSet(records, s.phi, dead)


def export_paths_csv(paths, fh, truncated=False):
    """Write polyline vertices as ``path_index, seq, x_m, y_m`` rows."""
    writer = csv.writer(fh)
    writer.writerow(["path_index", "seq", "x_m", "y_m"])
    for p, rec in enumerate(paths):
        line = rec.truncated if truncated else rec.polyline
        for k, (x, y) in enumerate(line.points):
            writer.writerow([p, k, f"{x:.12g}", f"{y:.12g}"])
