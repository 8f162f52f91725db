# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled precomputation kernels (same contract as ``_pykernels``)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor, sqrt, fabs
from libc.stdlib cimport realloc, free

cnp.import_array()

BACKEND = "cython"


cdef inline double _dmin(double a, double b) noexcept nogil:
    return a if a < b else b


cdef inline double _dmax(double a, double b) noexcept nogil:
    return a if a > b else b


cdef inline bint _hits(double px, double py, double qx, double qy,
                       double bx, double by, double tol) noexcept nogil:
    cdef double dx = qx - px
    cdef double dy = qy - py
    cdef double t0 = 0.0
    cdef double t1 = 1.0
    cdef double lo, hi, ta, tb
    lo = bx + tol
    hi = lo + (1.0 - 2.0 * tol)
    if dx == 0.0:
        if px < lo or px > hi:
            return False
    else:
        ta = (lo - px) / dx
        tb = (hi - px) / dx
        t0 = _dmax(t0, _dmin(ta, tb))
        t1 = _dmin(t1, _dmax(ta, tb))
    lo = by + tol
    hi = lo + (1.0 - 2.0 * tol)
    if dy == 0.0:
        if py < lo or py > hi:
            return False
    else:
        ta = (lo - py) / dy
        tb = (hi - py) / dy
        t0 = _dmax(t0, _dmin(ta, tb))
        t1 = _dmin(t1, _dmax(ta, tb))
    return t0 < t1


cdef bint _visible(const unsigned char[:, ::1] blocked, int m, int n,
                   long r0, long c0, long r1, long c1, double tol) noexcept nogil:
    cdef double px = c0 + 0.5
    cdef double py = r0 + 0.5
    cdef double qx = c1 + 0.5
    cdef double qy = r1 + 0.5
    cdef double ylo = _dmin(py, qy)
    cdef double yhi = _dmax(py, qy)
    cdef long rlo = <long>floor(ylo) - 1
    cdef long rhi = <long>floor(yhi) + 1
    cdef long r, c, clo, chi
    cdef double a, b, xa, xb, dy = qy - py
    if rlo < 0:
        rlo = 0
    if rhi > m - 1:
        rhi = m - 1
    for r in range(rlo, rhi + 1):
        # x extent of the segment within the row band [r, r + 1]
        if dy == 0.0:
            xa = px
            xb = qx
        else:
            a = (_dmax(<double>r, ylo) - py) / dy
            b = (_dmin(<double>(r + 1), yhi) - py) / dy
            a = _dmin(_dmax(a, 0.0), 1.0)
            b = _dmin(_dmax(b, 0.0), 1.0)
            xa = px + a * (qx - px)
            xb = px + b * (qx - px)
        clo = <long>floor(_dmin(xa, xb)) - 1
        chi = <long>floor(_dmax(xa, xb)) + 1
        if clo < 0:
            clo = 0
        if chi > n - 1:
            chi = n - 1
        for c in range(clo, chi + 1):
            if blocked[r, c] and _hits(px, py, qx, qy, <double>c, <double>r, tol):
                return False
    return True


def los_batch(blocked, long r0, long c0, rows, cols, double tol):
    cdef const unsigned char[:, ::1] B = np.ascontiguousarray(blocked, dtype=np.uint8)
    cdef const cnp.int64_t[::1] R = np.ascontiguousarray(rows, dtype=np.int64)
    cdef const cnp.int64_t[::1] C = np.ascontiguousarray(cols, dtype=np.int64)
    cdef Py_ssize_t k, K = R.shape[0]
    out = np.empty(K, dtype=bool)
    cdef cnp.npy_bool[::1] O = out
    cdef int m = B.shape[0], n = B.shape[1]
    with nogil:
        for k in range(K):
            O[k] = _visible(B, m, n, r0, c0, R[k], C[k], tol)
    return out


# --- binary heap keyed by (f, g, index) -------------------------------------

cdef struct Entry:
    double f
    double g
    long idx


cdef inline bint _less(Entry a, Entry b) noexcept nogil:
    if a.f != b.f:
        return a.f < b.f
    if a.g != b.g:
        return a.g < b.g
    return a.idx < b.idx


cdef struct Heap:
    Entry* data
    Py_ssize_t size
    Py_ssize_t cap


cdef int _push(Heap* h, Entry e) noexcept nogil:
    cdef Py_ssize_t i, parent
    cdef Entry* grown
    if h.size == h.cap:
        h.cap = h.cap * 2 + 16
        grown = <Entry*>realloc(h.data, h.cap * sizeof(Entry))
        if grown == NULL:
            return -1
        h.data = grown
    i = h.size
    h.size += 1
    while i > 0:
        parent = (i - 1) // 2
        if _less(e, h.data[parent]):
            h.data[i] = h.data[parent]
            i = parent
        else:
            break
    h.data[i] = e
    return 0


cdef Entry _pop(Heap* h) noexcept nogil:
    cdef Entry top = h.data[0]
    cdef Entry last
    cdef Py_ssize_t i = 0, child
    h.size -= 1
    if h.size == 0:
        return top
    last = h.data[h.size]
    while True:
        child = 2 * i + 1
        if child >= h.size:
            break
        if child + 1 < h.size and _less(h.data[child + 1], h.data[child]):
            child += 1
        if _less(h.data[child], last):
            h.data[i] = h.data[child]
            i = child
        else:
            break
    h.data[i] = last
    return top


def astar(blocked, double zeta, long src, long dst, double tol):
    cdef const unsigned char[:, ::1] B = np.ascontiguousarray(blocked, dtype=np.uint8)
    cdef int m = B.shape[0], n = B.shape[1]
    cdef long N = m * n
    g_arr = np.full(N, np.inf)
    h_arr = np.empty(N)
    pred_arr = np.full(N, -1, dtype=np.int64)
    closed_arr = np.zeros(N, dtype=np.uint8)
    cdef double[::1] g = g_arr
    cdef double[::1] hv = h_arr
    cdef cnp.int64_t[::1] pred = pred_arr
    cdef unsigned char[::1] closed = closed_arr
    cdef long v, u, ur, uc, vr, vc, dr, dc
    cdef long gr = dst // n, gc = dst % n
    cdef double nd, gv
    cdef double tol_cells = tol / zeta
    cdef Heap heap
    cdef Entry e, ne
    cdef bint better, tie
    cdef int err = 0
    for v in range(N):
        dr = v // n - gr
        dc = v % n - gc
        hv[v] = zeta * sqrt(<double>(dr * dr + dc * dc))
    heap.data = NULL
    heap.size = 0
    heap.cap = 0
    g[src] = 0.0
    e.f = hv[src]
    e.g = 0.0
    e.idx = src
    with nogil:
        err = _push(&heap, e)
        while heap.size > 0 and err == 0:
            e = _pop(&heap)
            u = e.idx
            if closed[u]:
                continue
            closed[u] = 1
            if u == dst:
                break
            ur = u // n
            uc = u % n
            for v in range(N):
                vr = v // n
                vc = v % n
                if closed[v] or B[vr, vc]:
                    continue
                dr = vr - ur
                dc = vc - uc
                nd = e.g + zeta * sqrt(<double>(dr * dr + dc * dc))
                gv = g[v]
                better = nd < gv - tol
                tie = (not better) and fabs(nd - gv) <= tol and u < pred[v]
                if not (better or tie):
                    continue
                if not _visible(B, m, n, ur, uc, vr, vc, tol_cells):
                    continue
                pred[v] = u
                if better:
                    g[v] = nd
                    ne.f = nd + hv[v]
                    ne.g = nd
                    ne.idx = v
                    err = _push(&heap, ne)
                    if err:
                        break
    free(heap.data)
    if err:
        raise MemoryError("heap allocation failed")
    if not closed[dst]:
        return None
    cdef long cur = dst
    path = [cur]
    while cur != src:
        cur = pred[cur]
        path.append(cur)
    path.reverse()
    return path


def chord_sums(xs, ys, cx, cy, double tau):
    cdef const double[::1] X = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] Y = np.ascontiguousarray(ys, dtype=np.float64)
    cdef const double[::1] CX = np.ascontiguousarray(cx, dtype=np.float64)
    cdef const double[::1] CY = np.ascontiguousarray(cy, dtype=np.float64)
    cdef Py_ssize_t i, k, N = CX.shape[0], S = X.shape[0] - 1
    out = np.zeros(N)
    cdef double[::1] acc = out
    cdef double px, py, qx, qy, dx, dy, L, ux, uy, wx, wy, s, cr, h2, hh, lo, hi, ch
    cdef double tau2 = tau * tau
    cdef double bxlo, bxhi, bylo, byhi
    with nogil:
        for k in range(S):
            px = X[k]
            py = Y[k]
            qx = X[k + 1]
            qy = Y[k + 1]
            dx = qx - px
            dy = qy - py
            L = sqrt(dx * dx + dy * dy)
            if L == 0.0:
                continue
            ux = dx / L
            uy = dy / L
            bxlo = _dmin(px, qx) - tau - 1.0
            bxhi = _dmax(px, qx) + tau + 1.0
            bylo = _dmin(py, qy) - tau - 1.0
            byhi = _dmax(py, qy) + tau + 1.0
            for i in range(N):
                if CX[i] < bxlo or CX[i] > bxhi or CY[i] < bylo or CY[i] > byhi:
                    continue
                wx = CX[i] - px
                wy = CY[i] - py
                s = wx * ux + wy * uy
                cr = wx * uy - wy * ux
                h2 = tau2 - cr * cr
                if h2 > 0.0:
                    hh = sqrt(h2)
                    lo = _dmax(s - hh, 0.0)
                    hi = _dmin(s + hh, L)
                    ch = _dmax(hi - lo, 0.0)
                    acc[i] = acc[i] + ch
    return out


def dominance_counts(lam):
    cdef const double[:, ::1] A = np.ascontiguousarray(lam, dtype=np.float64)
    cdef Py_ssize_t N = A.shape[0], r = A.shape[1]
    cdef Py_ssize_t a, b, p, k, K, i
    cdef bint ge, gt
    counts_arr = np.zeros(N, dtype=np.int64)
    cdef cnp.int64_t[::1] counts = counts_arr
    nz_arr = np.nonzero((np.asarray(A) > 0.0).any(axis=1))[0].astype(np.int64)
    cdef const cnp.int64_t[::1] nz = nz_arr
    K = nz.shape[0]
    with nogil:
        for a in range(N):
            counts[a] = K
        for k in range(K):
            a = nz[k]
            counts[a] = 0
            for p in range(K):
                b = nz[p]
                if b == a:
                    continue
                ge = True
                gt = False
                for i in range(r):
                    if A[b, i] < A[a, i]:
                        ge = False
                        break
                    if A[b, i] > A[a, i]:
                        gt = True
                if ge and gt:
                    counts[a] += 1
    return counts_arr
