"""Command-line entry point: ``opsbd <subcommand> ...``."""

import argparse
import csv
import glob
import json
import logging
import sys

from . import __version__
from .bench import (BenchConfig, best_known_from_traces, compute_qrtd, fmt, load_trace_files,
                    run_benchmark, write_qrtd_csv)
from .coverage import export_dominance_csv
from .instgen import GenParams, generate_instance
from .objective import Instance, read_solution, write_solution
from .oracle import exact_best, monte_carlo_estimate
from .paths import enumerate_paths, export_paths_csv
from .scenario import ScenarioError, read_scenario, save_scenario, validate_scenario
from .solvers import ALGORITHMS, Budget, canonical_name, run_solver

log = logging.getLogger("opsbd")


def _algo(name):
    try:
        return canonical_name(name)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _load(args):
    scen = read_scenario(args.scenario)
    radius = getattr(args, "radius", None)
    if radius is None and scen.params.radius is None:
        raise SystemExit("error: no detection radius in the scenario; pass --radius")
    return scen, Instance.build(scen, radius=radius)


def cmd_solve(args):
    scen, inst = _load(args)
    budget = Budget.wall_clock(args.time) if args.time is not None else Budget.eval_count(args.evals)
    trace = run_solver(args.algo, inst, args.detectors, budget, args.seed, alpha=args.alpha)
    if args.out:
        write_solution(args.out, trace.final, delta=args.detectors, scenario_name=scen.name,
                       algorithm=args.algo, seed=args.seed, radius=inst.cache.radius)
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            trace.write_csv(fh)
    cells = " ".join(f"({c.row},{c.col})" for c in trace.final.cells)
    print(f"W={fmt(trace.final.value)} evals={trace.evals} elapsed_s={fmt(trace.elapsed)}")
    print(f"cells {cells}")


def cmd_generate(args):
    p = GenParams(rows=args.rows, cols=args.cols, cell_size=args.cell,
                  entrances_per_side=args.entrances_per_side, objectives=args.objectives,
                  blocked_fraction=args.blocked, radius=args.radius, seed=args.seed,
                  benchmark_grid=args.benchmark_grid)
    scen = generate_instance(p)
    save_scenario(scen, args.out)
    print(f"wrote {args.out} ({scen.name})")


def cmd_bench(args):
    cfg = BenchConfig.load(args.config)
    if args.jobs is not None:
        cfg.jobs = args.jobs
    res = run_benchmark(cfg, out_dir=args.out_dir)
    failed = sum(1 for r in res.rows if r["status"] != "ok")
    print(f"{len(res.rows)} runs, {failed} failed; results in {args.out_dir}")
    for label, box in res.summary["algorithms"].items():
        rank = res.summary.get("mean_ranks", {}).get(label)
        print(f"  {label:12s} mean_dev={fmt(box['mean'])} median={fmt(box['median'])}"
              + (f" rank={fmt(rank)}" if rank is not None else ""))
    if "friedman" in res.summary:
        f = res.summary["friedman"]
        print(f"  friedman chi2={fmt(f['chi2'])} p={fmt(f['p_value'])}")


def cmd_qrtd(args):
    files = sorted(glob.glob(args.traces))
    if not files:
        raise SystemExit(f"error: no trace files match {args.traces!r}")
    traces = load_trace_files(files)
    best = best_known_from_traces(traces)
    horizon = max(ev.elapsed for events in traces.values() for ev in events)
    step = horizon / (args.points - 1) if args.points > 1 else 0.0
    grid = [k * step for k in range(args.points)]
    curves = compute_qrtd(traces, best, grid, args.quality_eps)
    write_qrtd_csv(args.out, curves, grid)
    print(f"wrote {args.out} ({len(curves)} algorithms, {len(files)} traces)")


def cmd_exact(args):
    _scen, inst = _load(args)
    res = exact_best(inst, args.detectors, use_pruning=not args.no_pruning, cap=args.cap)
    cells = " ".join(f"({c.row},{c.col})" for c in res.best.cells)
    print(f"W={fmt(res.best.value)} subsets={res.enumerated}")
    print(f"cells {cells}")


def cmd_simulate(args):
    scen = read_scenario(args.scenario)
    sol, meta = read_solution(args.solution)
    inst = Instance.build(scen, radius=meta.get("radius_m"))
    res = monte_carlo_estimate(inst, sol.cells, args.trials, args.seed)
    analytic = inst.value_of(inst.flat_of(sol.cells))
    z = (res.mean - analytic) / res.stderr if res.stderr > 0 else 0.0
    print(f"simulated={fmt(res.mean)} stderr={fmt(res.stderr)} analytic={fmt(analytic)} z={fmt(z)}")


def cmd_dominance(args):
    _scen, inst = _load(args)
    with open(args.out, "w", newline="") as fh:
        export_dominance_csv(inst.cache, fh, delta=args.detectors)
    kept = len(inst.cache.candidate_indices(args.detectors))
    print(f"wrote {args.out}; {kept} candidate cells for {args.detectors} detectors")


def cmd_paths(args):
    scen = read_scenario(args.scenario)
    ps = enumerate_paths(scen)
    with open(args.out, "w", newline="") as fh:
        export_paths_csv(ps, fh, truncated=args.truncated)
    print(f"wrote {args.out} ({len(ps)} paths)")


def cmd_validate(args):
    scen = read_scenario(args.scenario)
    problems = validate_scenario(scen)
    for p in problems:
        print(p)
    if problems:
        return 1
    print(f"{scen.name}: ok")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="opsbd", description="Detector placement on grid maps.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one algorithm on a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--algo", required=True, type=_algo, metavar="{" + "|".join(ALGORITHMS) + "}")
    p.add_argument("--detectors", required=True, type=int)
    p.add_argument("--radius", type=float)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--time", type=float, help="wall-clock budget in seconds")
    g.add_argument("--evals", type=int, help="evaluation budget")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--alpha", type=float)
    p.add_argument("--out")
    p.add_argument("--trace")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="write a random scenario")
    p.add_argument("--rows", type=int, default=32)
    p.add_argument("--cols", type=int, default=32)
    p.add_argument("--cell", type=float, default=10.0)
    p.add_argument("--entrances-per-side", type=int, default=2)
    p.add_argument("--objectives", type=int, default=4)
    p.add_argument("--blocked", type=float, default=0.05)
    p.add_argument("--radius", type=float, default=20.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--paper-grid", dest="benchmark_grid", action="store_true", help="restrict parameters to the benchmark grid")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="run a benchmark matrix from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("qrtd", help="qualified runtime distributions from trace files")
    p.add_argument("--traces", required=True, help="glob of <instance>__<algo>__<seed>.csv files")
    p.add_argument("--out", required=True)
    p.add_argument("--quality-eps", type=float, default=0.0)
    p.add_argument("--points", type=int, default=101)
    p.set_defaults(func=cmd_qrtd)

    p = sub.add_parser("exact", help="exhaustive optimum for small instances")
    p.add_argument("--scenario", required=True)
    p.add_argument("--detectors", required=True, type=int)
    p.add_argument("--radius", type=float)
    p.add_argument("--no-pruning", action="store_true")
    p.add_argument("--cap", type=int, default=10 ** 7)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("simulate", help="Monte Carlo check of a solution")
    p.add_argument("--scenario", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--trials", type=int, default=10 ** 6)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("dominance", help="dump dominator counts as CSV")
    p.add_argument("--scenario", required=True)
    p.add_argument("--detectors", required=True, type=int)
    p.add_argument("--radius", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dominance)

    p = sub.add_parser("paths", help="dump shortest paths as CSV")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--truncated", action="store_true", help="drop the dead zone")
    p.set_defaults(func=cmd_paths)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args) or 0
    except (ScenarioError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
