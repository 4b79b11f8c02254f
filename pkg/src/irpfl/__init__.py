"""LP rounding for star inventory routing with facility location.

Exact rational LP relaxations, deterministic rounding with proven factors
(12 uncapacitated, 3 and 6 for the capacitated access problem, 24 and 48 for
the capacitated star problem), exact oracles and a certification harness.
"""

from .instance import (GeneratorParams, IapGeneratorParams, IapInstance, Instance, InstanceError,
                       ParseError, Variant, generate_random, generate_random_iap,
                       make_partition_gadget, parse, serialize, validate)
from .lp import (LpModel, LpSolution, build_csiap_lp, build_cssirpfl_lp, build_usirpfl_lp,
                 export_lp, solve_lp)
from .oracle import (OracleResult, OracleTooLarge, exact_iap, exact_sirpfl, partition_exists,
                     visit_enum_iap, ww_dp)
from .rounding import (BallSystem, VisitPlan, build_balls, compute_s_star,
                       plan_visits_capacitated, plan_visits_uncapacitated, round_csiap,
                       round_cssirpfl, round_usirpfl, select_balls, solve, solve_detailed,
                       unsplit_repack)
from .schedule import Delivery, Schedule, check_schedule

__version__ = "0.1.0"

__all__ = [
    "GeneratorParams",
    "IapGeneratorParams",
    "IapInstance",
    "Instance",
    "InstanceError",
    "ParseError",
    "Variant",
    "generate_random",
    "generate_random_iap",
    "make_partition_gadget",
    "parse",
    "serialize",
    "validate",
    "LpModel",
    "LpSolution",
    "build_csiap_lp",
    "build_cssirpfl_lp",
    "build_usirpfl_lp",
    "export_lp",
    "solve_lp",
    "OracleResult",
    "OracleTooLarge",
    "exact_iap",
    "exact_sirpfl",
    "partition_exists",
    "visit_enum_iap",
    "ww_dp",
    "BallSystem",
    "VisitPlan",
    "build_balls",
    "compute_s_star",
    "plan_visits_capacitated",
    "plan_visits_uncapacitated",
    "round_csiap",
    "round_cssirpfl",
    "round_usirpfl",
    "select_balls",
    "solve",
    "solve_detailed",
    "unsplit_repack",
    "Delivery",
    "Schedule",
    "check_schedule",
]
