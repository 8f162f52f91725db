"""Time the precomputation kernels on both backends and check they agree bit for bit.

    python3 benchmarks/bench_kernels.py --size 32 --repeat 3
"""

import argparse
import sys
import time

import numpy as np

from opsbd import _kernels
from opsbd.geometry import GEOM_TOL
from opsbd.instgen import GenParams, generate_instance
from opsbd.paths import enumerate_paths


def best_of(fn, repeat):
    out, times = None, []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return out, min(times)


def workloads(s, paths):
    blocked = s.blocked_mask()
    n = s.cols
    tol = GEOM_TOL / s.cell_size
    rr, cc = np.nonzero(blocked == 0)
    pairs = [((e.row - 1) * n + e.col - 1, (o.row - 1) * n + o.col - 1)
             for e in s.entrances for o in s.objectives]
    cx = (cc + 0.5) * s.cell_size
    cy = (rr + 0.5) * s.cell_size
    tau = s.params.radius
    polys = [rec.truncated.points for rec in paths if len(rec.truncated) >= 2]
    sources = list(zip(rr[::7], cc[::7]))

    def los(k):
        return lambda: [np.asarray(k.los_batch(blocked, int(r), int(c), rr, cc, tol), dtype=bool)
                        for r, c in sources]

    def astar(k):
        return lambda: [k.astar(blocked, s.cell_size, a, b, GEOM_TOL) for a, b in pairs]

    def chords(k):
        return lambda: np.stack([k.chord_sums(p[:, 0], p[:, 1], cx, cy, tau) for p in polys])

    def dominance(k):
        lam = chords(k)().T.copy()
        return lambda: k.dominance_counts(lam)

    return {"line of sight": los, "shortest paths": astar, "coverage chords": chords,
            "dominance": dominance}


def same(a, b):
    if isinstance(a, list):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return a.shape == b.shape and a.tobytes() == b.tobytes()
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=32)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = _kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend not built; run `python3 setup.py build_ext --inplace`")
    s = generate_instance(GenParams(rows=args.size, cols=args.size, seed=args.seed))
    paths = enumerate_paths(s)
    print(f"{s.name}: {s.rows}x{s.cols}, {len(paths)} paths")
    print(f"{'kernel':18s}" + "".join(f"{name:>12s}" for name in backends) + "     speedup  identical")
    ok = True
    for label, make in workloads(s, paths).items():
        results, times = {}, {}
        for name, k in backends.items():
            results[name], times[name] = best_of(make(k), args.repeat)
        row = f"{label:18s}" + "".join(f"{times[n] * 1e3:10.2f}ms" for n in backends)
        if len(backends) > 1:
            match = same(results["python"], results["cython"])
            ok &= match
            row += f"  {times['python'] / times['cython']:9.1f}x  {match}"
        print(row)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
