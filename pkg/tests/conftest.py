import math
import os
from fractions import Fraction

import pytest

from opsbd.instgen import GenParams, generate_instance
from opsbd.objective import Instance
from opsbd.scenario import parse_scenario, read_scenario

DATA = os.path.join(os.path.dirname(__file__), "data")


def make_scenario(grid, casualties=None, cell_size=10.0, gamma="uniform", **params):
    """Scenario from text rows; objectives get casualties in row-major order."""
    objs = [(i + 1, j + 1) for i, line in enumerate(grid) for j, ch in enumerate(line) if ch == "O"]
    if casualties is None:
        casualties = [10.0] * len(objs)
    doc = {
        "name": "t",
        "rows": len(grid),
        "cols": len(grid[0]),
        "cell_size_m": cell_size,
        "grid": list(grid),
        "objectives": [{"row": r, "col": c, "casualties": float(x)}
                       for (r, c), x in zip(objs, casualties)],
        "gamma": gamma,
        "params": params,
    }
    return parse_scenario(doc)


def tiny_params(seed):
    """8 x 8 instances with the benchmark's other settings and a 10 m radius."""
    return GenParams(rows=8, cols=8, cell_size=10, entrances_per_side=2, objectives=4,
                     blocked_fraction=0.05, radius=10, seed=seed)


def tiny_instance(seed):
    return Instance.build(generate_instance(tiny_params(seed)))


def blocks_exact(blocked, a, b):
    """Exact rational test: does the segment between cell centers ``a`` and
    ``b`` (0-based (row, col)) cross the open interior of a blocked cell?"""
    px, py = Fraction(2 * a[1] + 1, 2), Fraction(2 * a[0] + 1, 2)
    qx, qy = Fraction(2 * b[1] + 1, 2), Fraction(2 * b[0] + 1, 2)
    dx, dy = qx - px, qy - py
    rows, cols = len(blocked), len(blocked[0])
    for r in range(rows):
        for c in range(cols):
            if not blocked[r][c]:
                continue
            lo, hi = Fraction(0), Fraction(1)
            empty = False
            for p0, d, edge in ((px, dx, c), (py, dy, r)):
                if d == 0:
                    if not edge < p0 < edge + 1:
                        empty = True
                    continue
                t1, t2 = (edge - p0) / d, (edge + 1 - p0) / d
                lo, hi = max(lo, min(t1, t2)), min(hi, max(t1, t2))
            if not empty and lo < hi:
                return True
    return False


def chord_quadratic(p, q, c, r):
    """Segment-disk overlap from the roots of |p + t(q - p) - c|^2 = r^2."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    fx, fy = p[0] - c[0], p[1] - c[1]
    a = dx * dx + dy * dy
    b = 2 * (fx * dx + fy * dy)
    k = fx * fx + fy * fy - r * r
    disc = b * b - 4 * a * k
    if a == 0 or disc <= 0:
        return 0.0
    s = math.sqrt(disc)
    t1, t2 = (-b - s) / (2 * a), (-b + s) / (2 * a)
    lo, hi = max(t1, 0.0), min(t2, 1.0)
    return max(hi - lo, 0.0) * math.sqrt(a)


@pytest.fixture(scope="session")
def fig2():
    return read_scenario(os.path.join(DATA, "fig2_8x8.json"))


@pytest.fixture(scope="session")
def fig2_instance(fig2):
    return Instance.build(fig2, radius=10)


@pytest.fixture(scope="session")
def tiny():
    return tiny_instance(0)
