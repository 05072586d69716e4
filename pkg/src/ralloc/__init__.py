"""Integer resource allocation with expensive black-box cost evaluations.

Every method reads cost values only through an :class:`EvaluationLedger`, so
solution quality and evaluation counts can be measured together.
"""
from .bounds import BoundModel, NotConvexFlagged, convex_bounds, model_bound_objective, monotone_bounds
from .core import (
    Allocation,
    AssumptionViolation,
    EvaluationLedger,
    IndexOutOfRange,
    Instance,
    MissingValue,
    SolveReport,
    create_instance,
    evaluate_point,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    objective_value,
    save_instance,
)
from .greedy import immediate_gain, prescient_score, run_myopic, run_prescient
from .harness import METHODS, SuiteConfig, run_suite, solve
from .instance_gen import GenSpec, SpecInvalid, generate, random_spec
from .one_opt import best_case_gains, init_one_opt, run_one_opt
from .sandwich import AllEvaluated, objective_gap, run_sandwich, select_point
from .subsolver import (
    CapExceeded,
    PointMenu,
    SubSolution,
    brute_force_solve,
    export_ilp,
    solve_menu,
)

__version__ = "0.1.0"
