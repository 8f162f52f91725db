"""Benchmark harness: algorithm x instance x seed matrices and their statistics."""

import csv
import json
import logging
import math
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .instgen import GenParams, generate_instance
from .objective import Instance
from .scenario import read_scenario
from .solvers import Budget, canonical_name, run_solver
from .solvers.base import RunTrace, TraceEvent

log = logging.getLogger(__name__)

RESULT_COLUMNS = ["instance", "algorithm", "seed", "final_w", "best_known_w",
                  "relative_deviation", "elapsed_to_final_s", "evaluations", "status"]


def fmt(x):
    """Numbers in output tables carry 12 significant digits."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return "" if x is None else str(x)


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    params: dict = field(default_factory=dict)
    label: str = ""

    @classmethod
    def from_dict(cls, doc):
        doc = dict(doc)
        name = canonical_name(doc.pop("name"))
        label = doc.pop("label", None)
        if label is None:
            label = f"{name}@{doc['alpha']}" if "alpha" in doc else name
        return cls(name, doc, label)


@dataclass
class BenchConfig:
    sources: list
    algorithms: list
    deltas: list
    budget: dict
    seeds: list = field(default_factory=lambda: [1])
    radius: float = None
    jobs: int = 1
    time_grid: list = None
    quality_eps: float = 0.0

    @classmethod
    def from_dict(cls, doc):
        algos = [AlgorithmSpec.from_dict(a) for a in doc["algorithms"]]
        if not algos:
            raise ValueError("no algorithms configured")
        labels = [a.label for a in algos]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate algorithm labels {labels}")
        cfg = cls(sources=list(doc["instances"]), algorithms=algos,
                  deltas=[int(d) for d in doc.get("deltas", [8])],
                  budget=dict(doc["budget"]), seeds=[int(s) for s in doc.get("seeds", [1])],
                  radius=doc.get("radius"), jobs=int(doc.get("jobs", 1)),
                  time_grid=doc.get("time_grid"), quality_eps=float(doc.get("quality_eps", 0.0)))
        for rows in cfg._budget_table().values():
            if not rows > 0:
                raise ValueError("budgets must be positive")
        return cfg

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def _budget_table(self):
        b = self.budget
        if "evals" in b:
            return {"evals": b["evals"]}
        if "seconds" in b:
            return {"seconds": b["seconds"]}
        if "seconds_by_size" in b:
            return {k: v for k, v in b["seconds_by_size"].items()}
        raise ValueError("budget needs 'evals', 'seconds' or 'seconds_by_size'")

    def budget_for(self, scenario):
        b = self.budget
        if "evals" in b:
            return Budget.eval_count(b["evals"])
        if "seconds" in b:
            return Budget.wall_clock(b["seconds"])
        table = {int(k): float(v) for k, v in b["seconds_by_size"].items()}
        size = max(scenario.rows, scenario.cols)
        fits = [k for k in sorted(table) if k >= size]
        return Budget.wall_clock(table[fits[0]] if fits else table[max(table)])

    def scenarios(self):
        """Yield every configured scenario (files and generated replicates)."""
        for src in self.sources:
            if "file" in src:
                yield read_scenario(src["file"])
            elif "generate" in src:
                base = dict(src["generate"])
                first = int(src.get("seed", base.pop("seed", 0)))
                for k in range(int(src.get("replicates", 1))):
                    yield generate_instance(GenParams.from_dict({**base, "seed": first + k}))
            else:
                raise ValueError(f"instance source needs 'file' or 'generate': {src}")


def _run_cell(job):
    inst, key, spec, delta, budget, seed = job
    try:
        trace = run_solver(spec.name, inst, delta, budget, seed, **spec.params)
        return key, spec.label, seed, trace, None
    except Exception as exc:  # recorded, not fatal
        return key, spec.label, seed, None, f"{type(exc).__name__}: {exc}"


def _safe(name):
    return re.sub(r"[^A-Za-z0-9.@=+-]+", "_", name)


def _default_jobs():
    return max((os.cpu_count() or 2) - 1, 1)


def relative_deviation(w, best_known):
    return (w - best_known) / best_known


def mean_ranks(table):
    """Average rank (1 = best, ties averaged) of each column over rows."""
    table = np.asarray(table, dtype=np.float64)
    ranks = np.vstack([stats.rankdata(row) for row in table])
    return ranks.mean(axis=0)


def friedman_statistic(table):
    """Friedman chi-square over an (instances x algorithms) table, lower
    values ranking better; returns ``(chi2, p_value)``."""
    table = np.asarray(table, dtype=np.float64)
    n, k = table.shape
    if n < 1 or k < 2:
        raise ValueError("need at least one instance and two algorithms")
    R = mean_ranks(table)
    chi2 = 12.0 * n / (k * (k + 1)) * (np.sum(R ** 2) - k * (k + 1) ** 2 / 4.0)
    return float(chi2), float(stats.chi2.sf(chi2, k - 1))


def box_summary(values):
    v = np.asarray(values, dtype=np.float64)
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    return {"n": int(v.size), "mean": float(v.mean()), "min": float(v.min()), "q1": float(q1),
            "median": float(med), "q3": float(q3), "max": float(v.max()),
            "upper_whisker": float(q3 + 1.5 * (q3 - q1))}


def compute_qrtd(traces, best_known, grid, quality_eps=0.0):
    """Fraction of runs that reached ``best_known * (1 + eps)`` by each time.

    ``traces`` maps ``(instance, algorithm, seed)`` to a RunTrace or a list
    of TraceEvents.  Returns ``{algorithm: [fraction per grid time]}``.
    """
    if not traces:
        raise ValueError("empty trace set")
    grid = np.asarray(grid, dtype=np.float64)
    hits = {}
    for (inst, algo, _seed), tr in traces.items():
        events = tr.events if isinstance(tr, RunTrace) else tr
        target = best_known[inst] * (1.0 + quality_eps)
        t = math.inf
        for ev in events:
            if ev.best_w <= target:
                t = ev.elapsed
                break
        hits.setdefault(algo, []).append(t)
    return {algo: [float(np.mean(np.asarray(ts) <= g)) for g in grid] for algo, ts in hits.items()}


@dataclass
class BenchResult:
    rows: list
    traces: dict
    best_known: dict
    summary: dict
    qrtd: dict
    grid: list


def _aggregate(rows, traces, algorithms, grid, quality_eps):
    ok = [r for r in rows if r["status"] == "ok"]
    best_known = {}
    for r in ok:
        best_known[r["instance"]] = min(best_known.get(r["instance"], math.inf), r["final_w"])
    for r in rows:
        bk = best_known.get(r["instance"])
        r["best_known_w"] = bk
        r["relative_deviation"] = relative_deviation(r["final_w"], bk) if r["status"] == "ok" else None

    labels = [a.label for a in algorithms]
    summary = {"algorithms": {}, "instances": sorted(best_known)}
    for lab in labels:
        dev = [r["relative_deviation"] for r in ok if r["algorithm"] == lab]
        if dev:
            summary["algorithms"][lab] = box_summary(dev)
    # per-instance mean deviation, complete cases only
    complete = []
    for inst in sorted(best_known):
        row = []
        for lab in labels:
            dev = [r["relative_deviation"] for r in ok if r["instance"] == inst and r["algorithm"] == lab]
            row.append(float(np.mean(dev)) if dev else None)
        if all(v is not None for v in row):
            complete.append(row)
    if complete:
        summary["mean_ranks"] = dict(zip(labels, map(float, mean_ranks(complete))))
        if len(labels) > 1:
            chi2, p = friedman_statistic(complete)
            summary["friedman"] = {"chi2": chi2, "p_value": p, "instances": len(complete),
                                   "algorithms": len(labels)}
    qrtd = compute_qrtd(traces, best_known, grid, quality_eps) if traces else {}
    return best_known, summary, qrtd


def run_benchmark(cfg, out_dir=None, progress=None):
    """Run every (instance, delta, algorithm, seed) cell of ``cfg``.

    Instances are built once per scenario; with ``cfg.jobs > 1`` cells are
    spread over worker processes (never inside one timed run).
    """
    jobs = []
    for scen in cfg.scenarios():
        inst = Instance.build(scen, radius=cfg.radius)
        budget = cfg.budget_for(scen)
        for delta in cfg.deltas:
            key = scen.name if len(cfg.deltas) == 1 else f"{scen.name}/d{delta}"
            inst.space(delta)
            for spec in cfg.algorithms:
                for seed in cfg.seeds:
                    jobs.append((inst, key, spec, delta, budget, seed))

    workers = cfg.jobs if cfg.jobs and cfg.jobs > 0 else _default_jobs()
    outputs = []
    if workers == 1:
        for k, job in enumerate(jobs):
            outputs.append(_run_cell(job))
            if progress:
                progress(k + 1, len(jobs))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for k, out in enumerate(pool.map(_run_cell, jobs)):
                outputs.append(out)
                if progress:
                    progress(k + 1, len(jobs))

    rows = []
    traces = {}
    for key, label, seed, trace, err in outputs:
        if err is not None:
            log.warning("cell %s / %s / %s failed: %s", key, label, seed, err)
            rows.append({"instance": key, "algorithm": label, "seed": seed, "final_w": None,
                         "elapsed_to_final_s": None, "evaluations": None, "status": f"error: {err}"})
            continue
        traces[(key, label, seed)] = trace
        last = trace.events[-1]
        rows.append({"instance": key, "algorithm": label, "seed": seed,
                     "final_w": trace.final.value, "elapsed_to_final_s": last.elapsed,
                     "evaluations": trace.evals, "status": "ok"})

    if cfg.time_grid is None:
        horizon = max((tr.elapsed for tr in traces.values()), default=1.0)
        grid = list(np.linspace(0.0, horizon, 101))
    elif isinstance(cfg.time_grid, dict):
        g = cfg.time_grid
        grid = list(np.arange(g.get("start", 0.0), g["stop"] + 1e-12, g["step"]))
    else:
        grid = [float(t) for t in cfg.time_grid]
    best_known, summary, qrtd = _aggregate(rows, traces, cfg.algorithms, grid, cfg.quality_eps)
    result = BenchResult(rows, traces, best_known, summary, qrtd, grid)
    if out_dir is not None:
        write_outputs(result, out_dir)
    return result


def write_outputs(result, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "results.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RESULT_COLUMNS)
        for r in result.rows:
            w.writerow([fmt(r.get(c)) for c in RESULT_COLUMNS])
    tdir = os.path.join(out_dir, "traces")
    os.makedirs(tdir, exist_ok=True)
    for (inst, algo, seed), tr in result.traces.items():
        path = os.path.join(tdir, f"{_safe(inst)}__{_safe(algo)}__{seed}.csv")
        with open(path, "w", newline="") as fh:
            tr.write_csv(fh)
    write_qrtd_csv(os.path.join(out_dir, "qrtd.csv"), result.qrtd, result.grid)
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump({**result.summary, "best_known": result.best_known}, fh, indent=2)
        fh.write("\n")


def write_qrtd_csv(path, curves, grid):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["algorithm", "time_s", "fraction"])
        for algo in sorted(curves):
            for t, f in zip(grid, curves[algo]):
                w.writerow([algo, fmt(float(t)), fmt(f)])


def load_trace_files(paths):
    """Read ``<instance>__<algorithm>__<seed>.csv`` trace files."""
    from .solvers.base import read_trace_csv

    traces = {}
    for p in paths:
        stem = os.path.basename(p)[:-4] if p.endswith(".csv") else os.path.basename(p)
        parts = stem.split("__")
        if len(parts) != 3:
            raise ValueError(f"trace file name {p!r} is not <instance>__<algorithm>__<seed>.csv")
        with open(p, newline="") as fh:
            events = read_trace_csv(fh)
        if events:
            traces[(parts[0], parts[1], parts[2])] = events
    return traces


def best_known_from_traces(traces):
    best = {}
    for (inst, _algo, _seed), events in traces.items():
        best[inst] = min(best.get(inst, math.inf), min(ev.best_w for ev in events))
    return best


def timed(fn, *args, **kwargs):
    t = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t


__all__ = ["AlgorithmSpec", "BenchConfig", "BenchResult", "TraceEvent", "box_summary",
           "compute_qrtd", "friedman_statistic", "mean_ranks", "relative_deviation",
           "run_benchmark", "write_outputs"]
