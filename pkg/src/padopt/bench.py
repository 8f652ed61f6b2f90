"""Benchmark harness: sweep algorithms over padding-bound values.

Each (algorithm, c) cell builds the problem, times the solve phase
alone, and evaluates the resulting scheme.  Rows come back sorted by
(algorithm, c) no matter how they were executed, so sequential and
parallel runs emit identical CSVs modulo the timing column.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from time import perf_counter

import numpy as np

from .metrics import JointMatrix, evaluate
from .pop import refine_shannon, solve_pop_renyi, solve_pop_shannon
from .problem import FileSet, problem_from_multiplier
from .prp import reduce_bandwidth, solve_prp_renyi
from .exceptions import ValidationError

logger = logging.getLogger(__name__)

BENCH_HEADER = (
    "algorithm,c,n,renyi_bits,shannon_bits,vulnerability,"
    "bandwidth_percent,elapsed_seconds"
)


def _run_popre(problem) -> JointMatrix:
    scheme, _ = solve_pop_renyi(problem)
    return scheme.to_joint(problem)


def _run_popresh(problem) -> JointMatrix:
    scheme, _ = solve_pop_renyi(problem)
    return refine_shannon(problem, scheme).to_joint(problem)


def _run_popsh(problem) -> JointMatrix:
    scheme, _ = solve_pop_shannon(problem)
    return scheme.to_joint(problem)


def _run_prpre(problem) -> JointMatrix:
    return solve_prp_renyi(problem)


def _run_prpreba(problem) -> JointMatrix:
    return reduce_bandwidth(problem, solve_prp_renyi(problem))


SOLVERS = {
    "popre": _run_popre,
    "popresh": _run_popresh,
    "popsh": _run_popsh,
    "prpre": _run_prpre,
    "prpreba": _run_prpreba,
}


@dataclass(frozen=True)
class BenchRecord:
    """One benchmark row plus off-CSV diagnostics."""

    algorithm: str
    c: float
    n: int
    renyi_bits: float
    shannon_bits: float
    vulnerability: float
    bandwidth_increase_percent: float
    elapsed_seconds: float
    avg_choices: float = float("nan")
    total_seconds: float = float("nan")
    error: str | None = None


def solve_cell(files: FileSet, algorithm: str, c: float) -> BenchRecord:
    """Build, solve, and evaluate one benchmark cell."""
    cell_start = perf_counter()
    try:
        problem = problem_from_multiplier(files, c)
        avg_choices = float(np.mean(problem.upper - problem.lower + 1))
        t0 = perf_counter()
        joint = SOLVERS[algorithm](problem)
        elapsed = perf_counter() - t0
        report = evaluate(joint)
        return BenchRecord(
            algorithm=algorithm,
            c=float(c),
            n=len(files),
            renyi_bits=report.renyi_bits,
            shannon_bits=report.shannon_bits,
            vulnerability=report.posterior_vulnerability,
            bandwidth_increase_percent=report.bandwidth_increase_percent,
            elapsed_seconds=elapsed,
            avg_choices=avg_choices,
            total_seconds=perf_counter() - cell_start,
        )
    except Exception as exc:  # failures stay in the row, the sweep goes on
        logger.warning("cell (%s, c=%g) failed: %s", algorithm, c, exc)
        return BenchRecord(
            algorithm=algorithm,
            c=float(c),
            n=len(files),
            renyi_bits=float("nan"),
            shannon_bits=float("nan"),
            vulnerability=float("nan"),
            bandwidth_increase_percent=float("nan"),
            elapsed_seconds=float("nan"),
            total_seconds=perf_counter() - cell_start,
            error=str(exc),
        )


def run_bench(
    files: FileSet,
    c_list,
    algorithms=tuple(SOLVERS),
    parallel: bool = False,
) -> list[BenchRecord]:
    """Solve every (algorithm, c) cell and return sorted records."""
    algorithms = list(algorithms)
    for name in algorithms:
        if name not in SOLVERS:
            raise ValidationError(
                f"unknown algorithm {name!r}; pick from {sorted(SOLVERS)}"
            )
    cells = [(a, float(c)) for a in algorithms for c in c_list]
    if parallel and len(cells) > 1:
        with ProcessPoolExecutor() as pool:
            records = list(
                pool.map(solve_cell, [files] * len(cells), *zip(*cells))
            )
    else:
        records = [solve_cell(files, a, c) for a, c in cells]
    records.sort(key=lambda rec: (rec.algorithm, rec.c))
    return records


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(x, ".6g")


def write_bench_csv(records, fh) -> None:
    fh.write(BENCH_HEADER + "\n")
    for rec in records:
        fh.write(
            f"{rec.algorithm},{_fmt(rec.c)},{rec.n},{_fmt(rec.renyi_bits)},"
            f"{_fmt(rec.shannon_bits)},{_fmt(rec.vulnerability)},"
            f"{_fmt(rec.bandwidth_increase_percent)},{_fmt(rec.elapsed_seconds)}\n"
        )
