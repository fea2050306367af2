"""Schedule dependent tasks onto unreliable heterogeneous processors.

The package optimizes two objectives at once, makespan and reliability cost,
with an elitist non-dominated-sorting GA over a height-ordered list encoding.
It ships a random instance generator, an exhaustive oracle for small
instances, and a CLI (see dagsched.cli or the `dagsched` entry point).
"""

from ._backend import backend_name
from .instance import (
    CyclicGraphError,
    FormatVersionError,
    Instance,
    InstanceFormatError,
    Platform,
    TaskGraph,
    generate_instance,
    generate_pmethod,
    load_instance,
    save_instance,
    validate,
)
from .nsga2 import (
    EvolutionConfig,
    FrontPoint,
    Individual,
    Population,
    RunResult,
    run,
)
from .oracle import ExactFront, OracleSizeError, exact_pareto_front, front_distance
from .schedule import (
    Evaluator,
    IllegalScheduleError,
    ObjectiveVector,
    Schedule,
    Timing,
    compute_heights,
    deadline_misses,
    evaluate,
    evaluate_makespan,
    evaluate_reliability_cost,
    is_legal,
    random_schedule,
)

__version__ = "0.1.0"

__all__ = [
    "CyclicGraphError",
    "Evaluator",
    "EvolutionConfig",
    "ExactFront",
    "FormatVersionError",
    "FrontPoint",
    "Individual",
    "Instance",
    "InstanceFormatError",
    "IllegalScheduleError",
    "ObjectiveVector",
    "OracleSizeError",
    "Platform",
    "Population",
    "RunResult",
    "Schedule",
    "TaskGraph",
    "Timing",
    "backend_name",
    "compute_heights",
    "deadline_misses",
    "evaluate",
    "evaluate_makespan",
    "evaluate_reliability_cost",
    "exact_pareto_front",
    "front_distance",
    "generate_instance",
    "generate_pmethod",
    "is_legal",
    "load_instance",
    "random_schedule",
    "run",
    "save_instance",
    "validate",
]
