"""Coverage cache: detectable path lengths per cell and dominance pruning."""

import csv

import numpy as np

from . import _kernels
from .scenario import CellRef


class CoverageCache:
    """Per-cell, per-path detectable lengths plus dominance counts.

    Attributes
    ----------
    lam : ndarray, shape (rows, cols, r)
        ``lam[i, j, p]`` is the length of the truncated path ``p`` inside
        the detection disk centered at cell ``(i+1, j+1)``; zero on blocked
        cells.
    delta : ndarray of int, shape (rows, cols)
        Number of unblocked cells dominating each cell.
    path_lengths : ndarray, shape (r,)
        Lengths of the truncated paths.
    """

    def __init__(self, lam, delta, blocked, path_lengths, radius):
        self.lam = lam
        self.delta = delta
        self.blocked = blocked
        self.path_lengths = path_lengths
        self.radius = radius
        for arr in (self.lam, self.delta, self.blocked, self.path_lengths):
            arr.setflags(write=False)

    @property
    def shape(self):
        return self.lam.shape[:2]

    @property
    def n_paths(self):
        return self.lam.shape[2]

    def candidate_indices(self, delta):
        """Row-major flat indices of unblocked cells with fewer than
        ``delta`` dominators."""
        if delta < 1:
            raise ValueError("number of detectors must be >= 1")
        ok = (self.blocked == 0) & (self.delta < delta)
        return np.flatnonzero(ok)

    def candidate_set(self, delta):
        n = self.lam.shape[1]
        return [CellRef(int(f) // n + 1, int(f) % n + 1) for f in self.candidate_indices(delta)]


def _lambda(s, paths, radius):
    m, n = s.rows, s.cols
    blocked = s.blocked_mask()
    rr, cc = np.nonzero(blocked == 0)
    cx = (cc + 0.5) * s.cell_size
    cy = (rr + 0.5) * s.cell_size
    lam = np.zeros((m, n, len(paths)))
    for p, rec in enumerate(paths):
        pts = rec.truncated.points
        if len(pts) < 2:
            continue
        lam[rr, cc, p] = _kernels.chord_sums(pts[:, 0], pts[:, 1], cx, cy, radius)
    return lam, blocked


def dominance_counts(lam, blocked):
    """Dominator counts among unblocked cells.

    Cell ``a`` is dominated by ``b`` when ``lam[b] >= lam[a]`` on every path
    and ``>`` on at least one.  Blocked cells cannot dominate; they get the
    same count as any all-zero cell.
    """
    m, n, r = lam.shape
    flat = lam.reshape(m * n, r)
    free = np.flatnonzero(blocked.reshape(-1) == 0)
    counts = _kernels.dominance_counts(flat[free])
    positive = int(np.count_nonzero((flat[free] > 0).any(axis=1)))
    out = np.full(m * n, positive, dtype=np.int64)
    out[free] = counts
    return out.reshape(m, n)


def build_cache(s, paths, radius=None):
    """Compute lambda and dominance for a scenario and its path set."""
    tau = s.params.radius if radius is None else radius
    if tau is None or not tau > 0:
        raise ValueError("a positive detection radius is required")
    lam, blocked = _lambda(s, paths, float(tau))
    delta = dominance_counts(lam, blocked)
    return CoverageCache(lam, delta, blocked, paths.truncated_lengths(), float(tau))


def candidate_set(cache, delta):
    return cache.candidate_set(delta)


def export_dominance_csv(cache, fh, delta=None):
    """Rows of ``row, col, blocked, delta[, candidate]`` for every cell."""
    writer = csv.writer(fh)
    header = ["row", "col", "blocked", "dominators"]
    if delta is not None:
        header.append("candidate")
        cand = np.zeros(cache.blocked.size, dtype=bool)
        cand[cache.candidate_indices(delta)] = True
        cand = cand.reshape(cache.blocked.shape)
    writer.writerow(header)
    m, n = cache.shape
    for i in range(m):
        for j in range(n):
            row = [i + 1, j + 1, int(cache.blocked[i, j]), int(cache.delta[i, j])]
            if delta is not None:
                row.append(int(cand[i, j]))
            writer.writerow(row)
