"""Pure numpy implementation of the precomputation kernels.

All grid coordinates here are 0-based and expressed in cell units: cell
``(r, c)`` is the unit square ``[c, c+1] x [r, r+1]`` with its center at
``(c + 0.5, r + 0.5)``.  Metric quantities (edge weights, chord lengths)
are in meters.

The compiled module ``_ckernels`` implements the same functions with the
same floating point operation order, so both backends return identical
results.
"""

import heapq

import numpy as np

BACKEND = "python"


def _hits(px, py, qx, qy, bx, by, tol):
    """Vectorized segment vs. open-square test (slab clipping).

    ``px..qy`` broadcast against the blocked-cell corners ``bx, by``.
    Squares are shrunk by ``tol`` so grazing contacts do not count.
    """
    dx = qx - px
    dy = qy - py
    shape = np.broadcast_shapes(np.shape(px), np.shape(qx), np.shape(bx), np.shape(by))
    t0 = np.zeros(shape)
    t1 = np.ones_like(t0)
    alive = np.ones(t0.shape, dtype=bool)
    for p, d, lo in ((px, dx, bx + tol), (py, dy, by + tol)):
        hi = lo + (1.0 - 2.0 * tol)
        p = np.broadcast_to(p, t0.shape)
        d = np.broadcast_to(d, t0.shape)
        lo = np.broadcast_to(lo, t0.shape)
        hi = np.broadcast_to(hi, t0.shape)
        flat = d == 0.0
        alive &= ~(flat & ((p < lo) | (p > hi)))
        safe = np.where(flat, 1.0, d)
        ta = (lo - p) / safe
        tb = (hi - p) / safe
        tmin = np.where(flat, 0.0, np.minimum(ta, tb))
        tmax = np.where(flat, 1.0, np.maximum(ta, tb))
        t0 = np.maximum(t0, tmin)
        t1 = np.minimum(t1, tmax)
    return alive & (t0 < t1)


def los_batch(blocked, r0, c0, rows, cols, tol):
    """Line of sight from cell ``(r0, c0)`` to each ``(rows[k], cols[k])``."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    out = np.ones(rows.shape[0], dtype=bool)
    if rows.shape[0] == 0:
        return out
    br, bc = np.nonzero(blocked)
    if br.size == 0:
        return out
    rlo = min(r0, int(rows.min())) - 1
    rhi = max(r0, int(rows.max())) + 1
    clo = min(c0, int(cols.min())) - 1
    chi = max(c0, int(cols.max())) + 1
    keep = (br >= rlo) & (br <= rhi) & (bc >= clo) & (bc <= chi)
    br = br[keep].astype(np.float64)
    bc = bc[keep].astype(np.float64)
    if br.size == 0:
        return out
    px = c0 + 0.5
    py = r0 + 0.5
    qx = (cols + 0.5)[:, None]
    qy = (rows + 0.5)[:, None]
    # chunk to bound the (targets x blocked) temporaries
    step = max(1, 2_000_000 // br.size)
    for s in range(0, rows.shape[0], step):
        hit = _hits(px, py, qx[s:s + step], qy[s:s + step], bc[None, :], br[None, :], tol)
        out[s:s + step] = ~hit.any(axis=1)
    return out


def astar(blocked, zeta, src, dst, tol):
    """Shortest path on the cell-center visibility graph.

    Returns the list of flat cell indices from ``src`` to ``dst`` or None
    when ``dst`` is unreachable.  Heap entries are ordered by
    ``(f, g, index)``; an equal-cost relaxation (within ``tol`` meters)
    replaces the predecessor only when the new one has a smaller index.
    """
    blocked = np.asarray(blocked, dtype=np.uint8)
    m, n = blocked.shape
    N = m * n
    free = blocked.reshape(-1) == 0
    rr = np.repeat(np.arange(m, dtype=np.int64), n)
    cc = np.tile(np.arange(n, dtype=np.int64), m)
    dr_goal = rr - dst // n
    dc_goal = cc - dst % n
    h = zeta * np.sqrt((dr_goal * dr_goal + dc_goal * dc_goal).astype(np.float64))
    g = np.full(N, np.inf)
    pred = np.full(N, -1, dtype=np.int64)
    closed = np.zeros(N, dtype=bool)
    tol_cells = tol / zeta
    g[src] = 0.0
    heap = [(h[src], 0.0, src)]
    while heap:
        f, gu, u = heapq.heappop(heap)
        if closed[u]:
            continue
        closed[u] = True
        if u == dst:
            break
        ur, uc = divmod(u, n)
        open_ = free & ~closed
        idx = np.nonzero(open_)[0]
        dr = rr[idx] - ur
        dc = cc[idx] - uc
        nd = gu + zeta * np.sqrt((dr * dr + dc * dc).astype(np.float64))
        gv = g[idx]
        better = nd < gv - tol
        tie = ~better & (np.abs(nd - gv) <= tol) & (u < pred[idx])
        want = better | tie
        if not want.any():
            continue
        sel = idx[want]
        vis = los_batch(blocked, ur, uc, rr[sel], cc[sel], tol_cells)
        sel_better = better[want] & vis
        sel_tie = tie[want] & vis
        for v, ndv in zip(sel[sel_better].tolist(), nd[want][sel_better].tolist()):
            g[v] = ndv
            pred[v] = u
            heapq.heappush(heap, (ndv + h[v], ndv, v))
        pred[sel[sel_tie]] = u
    if not closed[dst]:
        return None
    path = [dst]
    while path[-1] != src:
        path.append(int(pred[path[-1]]))
    path.reverse()
    return path


def chord_sums(xs, ys, cx, cy, tau):
    """Sum over the polyline's segments of the chord inside each disk.

    ``xs, ys`` are the polyline vertices; ``cx, cy`` the disk centers.
    """
    cx = np.asarray(cx, dtype=np.float64)
    cy = np.asarray(cy, dtype=np.float64)
    acc = np.zeros(cx.shape[0])
    tau2 = tau * tau
    for k in range(len(xs) - 1):
        px, py, qx, qy = float(xs[k]), float(ys[k]), float(xs[k + 1]), float(ys[k + 1])
        dx = qx - px
        dy = qy - py
        L = np.sqrt(dx * dx + dy * dy)
        if L == 0.0:
            continue
        ux = dx / L
        uy = dy / L
        wx = cx - px
        wy = cy - py
        s = wx * ux + wy * uy
        cr = wx * uy - wy * ux
        h2 = tau2 - cr * cr
        pos = h2 > 0.0
        hh = np.sqrt(np.where(pos, h2, 0.0))
        lo = np.maximum(s - hh, 0.0)
        hi = np.minimum(s + hh, L)
        ch = np.where(pos, np.maximum(hi - lo, 0.0), 0.0)
        acc = acc + ch
    return acc


def dominance_counts(lam):
    """Number of rows of ``lam`` that dominate each row.

    Row ``a`` dominates row ``b`` when ``lam[a] >= lam[b]`` everywhere and
    ``>`` somewhere.  Rows that are identically zero are counted in bulk.
    """
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    N = lam.shape[0]
    counts = np.zeros(N, dtype=np.int64)
    nz = np.nonzero((lam > 0.0).any(axis=1))[0]
    counts[:] = nz.size
    sub = lam[nz]
    for k, row in enumerate(sub):
        ge = (sub >= row).all(axis=1)
        gt = (sub > row).any(axis=1)
        counts[nz[k]] = int(np.count_nonzero(ge & gt))
    return counts
