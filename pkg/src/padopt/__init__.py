"""Padding schemes that minimize what a size-watching attacker learns.

The functional core builds padding problems (:mod:`padopt.problem`),
solves them (:mod:`padopt.pop`, :mod:`padopt.prp`), measures leakage
(:mod:`padopt.metrics`), and verifies everything against brute force
and a simulated attacker (:mod:`padopt.oracle`, :mod:`padopt.attack`).
Scikit-learn style estimators live in :mod:`padopt.estimators` and are
re-exported lazily from here.
"""

from .attack import AttackTrace, simulate_attacker
from .bench import SOLVERS, BenchRecord, run_bench, write_bench_csv
from .datasets import SyntheticSpec, generate_synthetic, load_dataset, save_dataset
from .exceptions import InternalCheckError, ValidationError
from .metrics import (
    DeterministicScheme,
    JointMatrix,
    LeakageReport,
    bandwidth_report,
    evaluate,
    posterior_vulnerability,
    prior_vulnerability,
    renyi_min_leakage,
    shannon_leakage,
)
from .oracle import OracleResult, brute_force_pop, grid_search_prp
from .pop import PossSets, compute_poss, refine_shannon, solve_pop_renyi, solve_pop_shannon
from .problem import (
    ConstraintSequence,
    FileRecord,
    FileSet,
    OutputAlphabet,
    PaddingProblem,
    problem_from_multiplier,
    problem_from_per_file_multipliers,
    server_identity_reduction,
    validate_constraints,
)
from .prp import reduce_bandwidth, solve_prp_renyi
from .scheme_io import SchemeDocument, load_scheme, save_scheme

__version__ = "0.1.0"

_ESTIMATORS = (
    "BasePadding",
    "PopRenyiPadding",
    "PopRenyiShannonPadding",
    "PopShannonPadding",
    "PrpRenyiPadding",
    "PrpRenyiBandwidthPadding",
)


def __getattr__(name):
    # Deferred so that importing the core never drags scikit-learn in.
    if name in _ESTIMATORS:
        from . import estimators

        return getattr(estimators, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


__all__ = [
    "AttackTrace",
    "BenchRecord",
    "ConstraintSequence",
    "DeterministicScheme",
    "FileRecord",
    "FileSet",
    "InternalCheckError",
    "JointMatrix",
    "LeakageReport",
    "OracleResult",
    "OutputAlphabet",
    "PaddingProblem",
    "PossSets",
    "SOLVERS",
    "SchemeDocument",
    "SyntheticSpec",
    "ValidationError",
    "bandwidth_report",
    "brute_force_pop",
    "compute_poss",
    "evaluate",
    "generate_synthetic",
    "grid_search_prp",
    "load_dataset",
    "load_scheme",
    "posterior_vulnerability",
    "prior_vulnerability",
    "problem_from_multiplier",
    "problem_from_per_file_multipliers",
    "reduce_bandwidth",
    "refine_shannon",
    "renyi_min_leakage",
    "run_bench",
    "save_dataset",
    "save_scheme",
    "server_identity_reduction",
    "shannon_leakage",
    "simulate_attacker",
    "solve_pop_renyi",
    "solve_pop_shannon",
    "solve_prp_renyi",
    "validate_constraints",
    "write_bench_csv",
    *_ESTIMATORS,
]
