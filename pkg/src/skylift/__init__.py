"""Max-min lifetime planning for a NOMA uplink served by one aerial relay.

Joint optimization of relay placement, per-device transmit power and SIC
decoding order under QoS, hardware and interference-protection constraints:
a globally optimal dual/ellipsoid solver with order enumeration, a
low-complexity SCA/penalty solver, and fixed-placement NOMA and FDMA
benchmarks, plus a sweep harness, an HTTP service and a CLI.
"""

from .baselines import solve_fdma, solve_noma_fixed
from .exact import (
    ExactSolverError,
    closed_form_power,
    power_coefficients,
    solve_fixed_order,
    solve_optimal,
)
from .experiments import (
    ALGORITHMS,
    ResultRow,
    SweepSpec,
    compare_algorithms,
    generate_scenario,
    run_algorithm,
    run_sweep,
)
from .model import (
    FeasibilityReport,
    PlacementSolution,
    Scenario,
    canonical_json,
    evaluate,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from .sca import PenaltyState, alpha_from_order, order_from_alpha, sca_solve

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "ExactSolverError",
    "FeasibilityReport",
    "PenaltyState",
    "PlacementSolution",
    "ResultRow",
    "Scenario",
    "SweepSpec",
    "alpha_from_order",
    "canonical_json",
    "closed_form_power",
    "compare_algorithms",
    "evaluate",
    "generate_scenario",
    "load_scenario",
    "order_from_alpha",
    "power_coefficients",
    "run_algorithm",
    "run_sweep",
    "save_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "sca_solve",
    "solve_fdma",
    "solve_fixed_order",
    "solve_noma_fixed",
    "solve_optimal",
    "__version__",
]
