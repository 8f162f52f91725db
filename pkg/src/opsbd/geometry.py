"""Planar geometry on the scenario grid.

Cell ``(i, j)`` (1-based) is the square ``[(j-1)z, jz] x [(i-1)z, iz]``
with ``z`` the cell size; its center is ``((j - 0.5) z, (i - 0.5) z)``.
"""

import math
from typing import NamedTuple

import numpy as np

from . import _kernels

GEOM_TOL = 1e-9  # meters


class Point(NamedTuple):
    x: float
    y: float


def cell_center(cell, cell_size):
    return Point((cell[1] - 0.5) * cell_size, (cell[0] - 0.5) * cell_size)


class Polyline:
    """Immutable sequence of points with a cached total length.

    A polyline with a single point (or none) has length 0.  The special
    value returned by :meth:`unreachable` has infinite length and no points.
    """

    __slots__ = ("_pts", "_length")

    def __init__(self, points):
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        pts.setflags(write=False)
        self._pts = pts
        if len(pts) < 2:
            self._length = 0.0
        else:
            d = np.diff(pts, axis=0)
            self._length = float(np.sum(np.hypot(d[:, 0], d[:, 1])))

    @classmethod
    def unreachable(cls):
        line = cls([])
        line._length = math.inf
        return line

    @property
    def points(self):
        return self._pts

    @property
    def length(self):
        return self._length

    @property
    def is_finite(self):
        return math.isfinite(self._length)

    def segments(self):
        for k in range(len(self._pts) - 1):
            yield Point(*self._pts[k]), Point(*self._pts[k + 1])

    def __len__(self):
        return len(self._pts)

    def __eq__(self, other):
        if not isinstance(other, Polyline):
            return NotImplemented
        return self._length == other._length and np.array_equal(self._pts, other._pts)

    def __hash__(self):
        return hash((self._length, self._pts.tobytes()))

    def __repr__(self):
        return f"Polyline({len(self._pts)} points, length={self._length:.6g})"


def line_of_sight(a, b, s):
    """True iff the segment between the centers of ``a`` and ``b`` misses the
    open interior of every blocked cell.  Grazing an edge or a corner is
    allowed."""
    hit = _kernels.los_batch(s.blocked_mask(), a[0] - 1, a[1] - 1,
                             np.array([b[0] - 1]), np.array([b[1] - 1]),
                             GEOM_TOL / s.cell_size)
    return bool(hit[0])


def chord_length(p, q, center, radius):
    """Length of segment ``pq`` inside the closed disk ``(center, radius)``."""
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    seg = math.sqrt(dx * dx + dy * dy)
    if seg == 0.0:
        return 0.0
    ux = dx / seg
    uy = dy / seg
    wx = center[0] - p[0]
    wy = center[1] - p[1]
    along = wx * ux + wy * uy
    across = wx * uy - wy * ux
    h2 = radius * radius - across * across
    if h2 <= 0.0:
        return 0.0
    h = math.sqrt(h2)
    return max(min(along + h, seg) - max(along - h, 0.0), 0.0)


def truncate_dead_zone(path, dead_length):
    """Prefix of ``path`` with arc length ``max(0, length - dead_length)``.

    When nothing is left the result is the single starting point.
    """
    if dead_length < 0:
        raise ValueError("dead_length must be nonnegative")
    if dead_length == 0 or len(path) < 2:
        return path
    keep = path.length - dead_length
    pts = path.points
    if keep <= 0:
        return Polyline(pts[:1])
    out = [pts[0]]
    acc = 0.0
    for k in range(len(pts) - 1):
        a, b = pts[k], pts[k + 1]
        seg = math.hypot(b[0] - a[0], b[1] - a[1])
        if acc + seg < keep:
            out.append(b)
            acc += seg
            continue
        rest = keep - acc
        if rest > GEOM_TOL * 1e-3:
            t = rest / seg
            out.append(a + t * (b - a))
        break
    return Polyline(out)
