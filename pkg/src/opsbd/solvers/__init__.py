"""Placement algorithms behind a common anytime interface.

Every ``*_run`` function takes ``(instance, delta, budget, seed, **params)``
and returns a :class:`RunTrace`.  Randomness comes from a PCG64 generator
seeded with the 64-bit ``seed``, so EvalCount budgets make runs
reproducible.
"""

from .base import Budget, RunTrace, TraceEvent, make_rng, read_trace_csv
from .construct import (decode_decision_vector, grasp_construct, grasp_run, greedy,
                        greedy_run)
from .evolution import UnivariateModel, ea_run, umda_run
from .local import hc_run, hill_climb

ALGORITHMS = ("greedy", "grasp", "grasp-hc", "hc", "ea", "umda")

_PARAMS = {
    "greedy": (),
    "grasp": ("alpha",),
    "grasp-hc": ("alpha",),
    "hc": (),
    "ea": ("pop_size", "px", "pm"),
    "umda": ("pop_size", "select_size", "alpha", "smoothing"),
}


def canonical_name(name):
    name = name.strip().lower().replace("+", "-").replace("_", "-")
    if name not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}")
    return name


def run_solver(name, instance, delta, budget, seed, **params):
    """Dispatch to a solver by name, ignoring parameters it does not take."""
    name = canonical_name(name)
    kw = {k: v for k, v in params.items() if k in _PARAMS[name] and v is not None}
    if name == "greedy":
        trace = greedy_run(instance, delta, budget, seed)
    elif name == "grasp":
        trace = grasp_run(instance, delta, budget, seed, **kw)
    elif name == "grasp-hc":
        trace = grasp_run(instance, delta, budget, seed, local_search=True, **kw)
    elif name == "hc":
        trace = hc_run(instance, delta, budget, seed)
    elif name == "ea":
        trace = ea_run(instance, delta, budget, seed, **kw)
    else:
        trace = umda_run(instance, delta, budget, seed, **kw)
    return trace


__all__ = [
    "ALGORITHMS", "Budget", "RunTrace", "TraceEvent", "UnivariateModel", "canonical_name",
    "decode_decision_vector", "ea_run", "grasp_construct", "grasp_run", "greedy", "greedy_run",
    "hc_run", "hill_climb", "make_rng", "read_trace_csv", "run_solver", "umda_run",
]
