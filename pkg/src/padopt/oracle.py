"""Ground-truth oracles for desk-scale instances.

These deliberately avoid the solvers' recurrences: the deterministic
oracle enumerates every feasible assignment outright, and the
randomized oracle enumerates every way of splitting each file's mass
into equal chunks over its window.  Both are exact on their search
space; the grid answer is an upper bound on the true randomized optimum
that tightens as the resolution grows.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .exceptions import ValidationError
from .metrics import DeterministicScheme, entropy_terms
from .problem import PaddingProblem

# Hard ceiling on the number of enumerated assignments.
ENUMERATION_LIMIT = 10_000_000
_CHUNK = 65_536
# Two objective values within this distance are treated as equal when
# collecting the optimal set.
_EQ_TOL = 1e-12


@dataclass(frozen=True)
class OracleResult:
    """Exact minima over all feasible deterministic schemes."""

    min_vulnerability: float
    min_shannon_bits: float
    min_bandwidth_among_vulnerability_optimal: float
    optimal_scheme_count: int
    witness_vulnerability: DeterministicScheme
    witness_shannon: DeterministicScheme
    witness_bandwidth: DeterministicScheme


def _scheme_count(problem: PaddingProblem) -> int:
    widths = (problem.upper - problem.lower + 1).astype(object)
    total = 1
    for w in widths:
        total *= int(w)
    return total


def _decode(problem: PaddingProblem, indices: np.ndarray) -> np.ndarray:
    """Mixed-radix decode of scheme indices into (len, n) column picks (0-based)."""
    widths = (problem.upper - problem.lower + 1).astype(np.int64)
    cols = np.empty((indices.size, problem.n), dtype=np.int64)
    rem = indices.astype(np.int64).copy()
    for i in range(problem.n - 1, -1, -1):
        cols[:, i] = problem.lower[i] - 1 + rem % widths[i]
        rem //= widths[i]
    return cols


def _batch_metrics(problem: PaddingProblem, cols: np.ndarray):
    """Vulnerability, output entropy, and expected size per enumerated scheme."""
    k = cols.shape[0]
    p = problem.files.frequencies
    rows = np.arange(k)
    masses = np.zeros((k, problem.m))
    maxima = np.zeros((k, problem.m))
    for i in range(problem.n):
        ci = cols[:, i]
        masses[rows, ci] += p[i]
        maxima[rows, ci] = np.maximum(maxima[rows, ci], p[i])
    vulnerability = maxima.sum(axis=1)
    shannon = entropy_terms(masses).sum(axis=1)
    expected_size = masses @ problem.alphabet.sizes
    return vulnerability, shannon, expected_size


def brute_force_pop(problem: PaddingProblem) -> OracleResult:
    """Enumerate every feasible deterministic scheme.

    Streams the search space in chunks; refuses to start when it holds
    more than ``ENUMERATION_LIMIT`` assignments.
    """
    total = _scheme_count(problem)
    if total > ENUMERATION_LIMIT:
        raise ValidationError(
            f"search space holds {total} assignments, above the limit of "
            f"{ENUMERATION_LIMIT}"
        )

    min_v = np.inf
    min_h = np.inf
    arg_v = arg_h = 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        v, h, _ = _batch_metrics(problem, _decode(problem, idx))
        i = int(np.argmin(v))
        if v[i] < min_v:
            min_v, arg_v = float(v[i]), int(idx[i])
        i = int(np.argmin(h))
        if h[i] < min_h:
            min_h, arg_h = float(h[i]), int(idx[i])

    min_size = np.inf
    arg_size = 0
    optimal_count = 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        v, _, size = _batch_metrics(problem, _decode(problem, idx))
        opt = v <= min_v + _EQ_TOL
        optimal_count += int(opt.sum())
        if opt.any():
            masked = np.where(opt, size, np.inf)
            i = int(np.argmin(masked))
            if masked[i] < min_size:
                min_size, arg_size = float(masked[i]), int(idx[i])

    def witness(index: int) -> DeterministicScheme:
        cols = _decode(problem, np.asarray([index]))[0] + 1
        return DeterministicScheme(tuple(int(c) for c in cols))

    return OracleResult(
        min_vulnerability=min_v,
        min_shannon_bits=min_h,
        min_bandwidth_among_vulnerability_optimal=min_size,
        optimal_scheme_count=optimal_count,
        witness_vulnerability=witness(arg_v),
        witness_shannon=witness(arg_h),
        witness_bandwidth=witness(arg_size),
    )


def _row_options(problem: PaddingProblem, i: int, resolution: int) -> np.ndarray:
    """All ways to spread file i's mass in resolution-th chunks over its window."""
    lo = int(problem.lower[i]) - 1
    hi = int(problem.upper[i]) - 1
    width = hi - lo + 1
    unit = problem.files.frequencies[i] / resolution
    count = comb(resolution + width - 1, width - 1)
    options = np.zeros((count, problem.m))
    for row, bars in enumerate(combinations(range(resolution + width - 1), width - 1)):
        prev = -1
        for slot, bar in enumerate(list(bars) + [resolution + width - 1]):
            options[row, lo + slot] = (bar - prev - 1) * unit
            prev = bar
    return options


def _pareto_floor(points: np.ndarray) -> np.ndarray:
    """Drop every point that is >= another point in all coordinates."""
    order = np.argsort(points.sum(axis=1), kind="stable")
    points = points[order]
    kept = np.empty_like(points)
    k = 0
    for row in points:
        if k and bool((kept[:k] <= row + 1e-15).all(axis=1).any()):
            continue
        kept[k] = row
        k += 1
    return kept[:k].copy()


def grid_search_prp(problem: PaddingProblem, resolution: int) -> float:
    """Minimum sum of column maxima over the chunked randomized grid.

    Rows are combined one at a time; after each row only the
    column-maxima vectors not dominated by another are kept, which is
    lossless because the objective is monotone in every coordinate.
    """
    if problem.n > 4 or problem.m > 4:
        raise ValidationError(
            f"grid oracle is limited to 4 files and 4 sizes, got "
            f"{problem.n} x {problem.m}"
        )
    if not 1 <= resolution <= 12:
        raise ValidationError(f"resolution must be in [1, 12], got {resolution}")

    frontier = np.zeros((1, problem.m))
    for i in range(problem.n):
        options = _row_options(problem, i, resolution)
        merged = np.maximum(frontier[:, None, :], options[None, :, :])
        merged = merged.reshape(-1, problem.m)
        merged = np.unique(merged, axis=0)
        frontier = _pareto_floor(merged)
    return float(frontier.sum(axis=1).min())
