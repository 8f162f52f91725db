"""Detector placement against attacks on grid maps.

Typical use::

    from opsbd import read_scenario, Instance, run_solver, Budget
    inst = Instance.build(read_scenario("map.json"), radius=20)
    trace = run_solver("hc", inst, delta=8, budget=Budget.eval_count(10**5), seed=1)
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .instgen import GenParams, generate_instance
from .objective import Instance, Solution, evaluate, evaluate_swap
from .oracle import exact_best, monte_carlo_estimate
from .scenario import Params, Scenario, parse_scenario, read_scenario, write_scenario
from .solvers import ALGORITHMS, Budget, RunTrace, run_solver

__all__ = [
    "ALGORITHMS", "BACKEND", "Budget", "GenParams", "Instance", "Params", "RunTrace", "Scenario",
    "Solution", "evaluate", "evaluate_swap", "exact_best", "generate_instance", "monte_carlo_estimate",
    "parse_scenario", "read_scenario", "run_solver", "write_scenario",
]
