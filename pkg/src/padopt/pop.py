"""Deterministic (pad-once) scheme solvers.

Three solvers share the window model:

* :func:`solve_pop_renyi` finds the deterministic scheme minimizing the
  one-try attacker's success probability (the sum of column maxima of
  the joint matrix) by an interval DP, breaking ties toward smaller
  output sizes to hold down average padding.
* :func:`refine_shannon` lowers the Shannon leakage of such a scheme
  without changing any column maximum, by re-grouping files over the
  columns they can occupy "for free" (their poss sets).
* :func:`solve_pop_shannon` is the classic baseline that minimizes the
  output entropy outright, via a prefix DP over contiguous groups.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InternalCheckError, ValidationError
from .metrics import (
    MAX_MATCH_TOL,
    DeterministicScheme,
    JointMatrix,
    entropy_terms,
    posterior_vulnerability,
    shannon_leakage,
)
from .problem import PaddingProblem

# Two DP candidate values within this absolute distance count as tied;
# the smaller column index wins, keeping outputs platform-stable.
TIE_TOL = 1e-12


class _ArgmaxTable:
    """Sparse table answering range argmax queries, lowest index on ties."""

    def __init__(self, values: np.ndarray):
        self.values = values
        n = values.size
        table = [np.arange(n, dtype=np.int64)]
        j = 1
        while (1 << j) <= n:
            prev = table[-1]
            half = 1 << (j - 1)
            width = n - (1 << j) + 1
            left = prev[:width]
            right = prev[half : half + width]
            table.append(np.where(values[right] > values[left], right, left))
            j += 1
        self.table = table

    def query(self, lo: int, hi: int) -> int:
        """Argmax over the inclusive 0-based range [lo, hi]."""
        span = hi - lo + 1
        j = span.bit_length() - 1
        a = int(self.table[j][lo])
        b = int(self.table[j][hi - (1 << j) + 1])
        if self.values[b] > self.values[a]:
            return b
        if self.values[a] > self.values[b]:
            return a
        return min(a, b)


def solve_pop_renyi(problem: PaddingProblem) -> tuple[DeterministicScheme, float]:
    """Deterministic scheme minimizing the sum of column maxima.

    The state ``(a, b)`` covers files ``a+1 .. b``.  The heaviest file
    in the interval must dominate whatever column it lands on, so each
    candidate column ``k`` in its window contributes its frequency once,
    pulls every interval file whose window contains ``k`` onto ``k``,
    and splits the rest into the two sub-intervals that cannot reach
    ``k`` (monotone windows make both sides contiguous).  Memoization is
    top-down, so only reachable states are computed.

    Returns the scheme and its objective value, which equals the scheme's
    posterior vulnerability.
    """
    p = problem.files.frequencies
    n = problem.n
    m = problem.m
    l0 = problem.lower - 1
    r0 = problem.upper - 1
    # For column k (0-based): number of files whose window ends left of k,
    # and number whose window starts at or left of k.  Both are file
    # counts, i.e. 1-based file indices.
    cnt_r_below = np.searchsorted(r0, np.arange(m), side="left")
    cnt_l_upto = np.searchsorted(l0, np.arange(m), side="right")
    argmax = _ArgmaxTable(p)

    value: dict[tuple[int, int], float] = {}
    choice: dict[tuple[int, int], tuple[int, int, int]] = {}
    stack = [(0, n)]
    while stack:
        a, b = stack.pop()
        if a == b or (a, b) in value:
            continue
        imax = argmax.query(a, b - 1)
        k_lo, k_hi = int(l0[imax]), int(r0[imax])
        pending = []
        for k in range(k_lo, k_hi + 1):
            a_star = max(a, int(cnt_r_below[k]))
            b_star = min(b, int(cnt_l_upto[k]))
            if a_star > a and (a, a_star) not in value:
                pending.append((a, a_star))
            if b_star < b and (b_star, b) not in value:
                pending.append((b_star, b))
        if pending:
            stack.append((a, b))
            stack.extend(pending)
            continue
        best_val = np.inf
        best = None
        for k in range(k_lo, k_hi + 1):
            a_star = max(a, int(cnt_r_below[k]))
            b_star = min(b, int(cnt_l_upto[k]))
            val = (
                p[imax]
                + value.get((a, a_star), 0.0)
                + value.get((b_star, b), 0.0)
            )
            if val < best_val - TIE_TOL:
                best_val = val
                best = (k, a_star, b_star)
        value[(a, b)] = best_val
        choice[(a, b)] = best

    assignment = np.zeros(n, dtype=np.int64)
    walk = [(0, n)]
    while walk:
        a, b = walk.pop()
        if a == b:
            continue
        k, a_star, b_star = choice[(a, b)]
        assignment[a_star:b_star] = k + 1
        if a_star > a:
            walk.append((a, a_star))
        if b_star < b:
            walk.append((b_star, b))

    scheme = DeterministicScheme(tuple(int(c) for c in assignment))
    scheme.validate(problem)
    return scheme, float(value[(0, n)])


@dataclass(frozen=True)
class PossSets:
    """Per file: the columns it may occupy without raising any column max."""

    sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for i, s in enumerate(self.sets):
            if not s:
                raise ValidationError(f"poss set for file {i + 1} is empty")


def compute_poss(problem: PaddingProblem, joint: JointMatrix) -> PossSets:
    """Columns (1-based) each file can move to freely.

    A column qualifies when it lies in the file's window and its current
    maximum is at least the file's frequency, so parking the file there
    cannot raise the maximum.  The file's own column always qualifies.
    """
    maxima = joint.column_maxima()
    p = problem.files.frequencies
    sets = []
    for i in range(problem.n):
        lo = int(problem.lower[i]) - 1
        hi = int(problem.upper[i]) - 1
        window = maxima[lo : hi + 1] >= p[i] - MAX_MATCH_TOL
        cols = np.nonzero(window)[0] + lo + 1
        sets.append(tuple(int(c) for c in cols))
    return PossSets(tuple(sets))


def refine_shannon(
    problem: PaddingProblem, scheme: DeterministicScheme
) -> DeterministicScheme:
    """Regroup a vulnerability-optimal scheme to lower Shannon leakage.

    Works on the columns actually referenced by some poss set (columns
    with a zero maximum can never appear in one).  The DP over column
    intervals ``[a, b]`` considers only the files whose whole poss set
    fits inside; choosing a column ``j`` pulls all of them that can
    reach ``j`` onto it and recurses on both sides.  A candidate is
    skipped when some in-scope file could reach both sides of ``j`` but
    not ``j`` itself, since such a file could not be routed; the largest
    referenced column never has this problem, so every state keeps at
    least one candidate.

    The output preserves the posterior vulnerability (checked) and never
    increases Shannon leakage (checked).
    """
    joint_in = scheme.to_joint(problem)
    poss = compute_poss(problem, joint_in)
    p = problem.files.frequencies
    n = problem.n

    used = sorted({c for s in poss.sets for c in s})
    col_of = {c: i for i, c in enumerate(used)}
    m = len(used)
    poss_c = [np.asarray([col_of[c] for c in s], dtype=np.int64) for s in poss.sets]
    poss_sets = [frozenset(int(x) for x in a) for a in poss_c]
    pmin = np.asarray([a[0] for a in poss_c])
    pmax = np.asarray([a[-1] for a in poss_c])

    lens = np.asarray([a.size for a in poss_c])
    flat_col = np.concatenate(poss_c)
    flat_row = np.repeat(np.arange(n), lens)
    flat_p = p[flat_row]
    flat_pmin = pmin[flat_row]
    flat_pmax = pmax[flat_row]
    flat_interior = (flat_col > flat_pmin) & (flat_col < flat_pmax)

    assignment = np.zeros(n, dtype=np.int64)

    # Columns in distinct connected components (no poss set spans the
    # boundary) regroup independently, so solve one DP per component.
    # This keeps the near-identity cases (tiny windows, singleton poss
    # sets) linear instead of quadratic in the column count.
    gap = np.zeros(m + 1, dtype=np.int64)
    wide = pmax > pmin
    np.add.at(gap, pmin[wide], 1)
    np.add.at(gap, pmax[wide], -1)
    gap_cover = np.cumsum(gap[:m])

    start = 0
    for end in range(m):
        if end < m - 1 and gap_cover[end] > 0:
            continue
        _refine_component(
            start,
            end,
            assignment,
            used,
            poss_sets,
            pmin,
            pmax,
            flat_col,
            flat_p,
            flat_pmin,
            flat_pmax,
            flat_interior,
        )
        start = end + 1

    if np.any(assignment == 0):
        raise InternalCheckError("refinement left a file unassigned")

    refined = DeterministicScheme(tuple(int(c) for c in assignment))
    refined.validate(problem)
    joint_out = refined.to_joint(problem)
    v_in = posterior_vulnerability(joint_in)
    v_out = posterior_vulnerability(joint_out)
    if abs(v_in - v_out) > 1e-9:
        raise InternalCheckError(
            f"refinement changed the vulnerability: {v_in!r} -> {v_out!r}"
        )
    if shannon_leakage(joint_out) > shannon_leakage(joint_in) + 1e-9:
        raise InternalCheckError("refinement increased Shannon leakage")
    return refined


def _refine_component(
    lo: int,
    hi: int,
    assignment: np.ndarray,
    used: list[int],
    poss_sets: list[frozenset],
    pmin: np.ndarray,
    pmax: np.ndarray,
    flat_col: np.ndarray,
    flat_p: np.ndarray,
    flat_pmin: np.ndarray,
    flat_pmax: np.ndarray,
    flat_interior: np.ndarray,
) -> None:
    """Interval DP over one connected block of columns; writes assignments."""
    if lo == hi:
        # Single column: everyone whose poss set lives here stays here.
        for i in np.nonzero((pmin == lo) & (pmax == lo))[0]:
            assignment[i] = used[lo]
        return

    value: dict[tuple[int, int], float] = {}
    choice: dict[tuple[int, int], int | None] = {}

    def state_candidates(a: int, b: int):
        """Valid candidate columns and the per-column pulled mass."""
        width = b - a + 1
        sel = (flat_pmin >= a) & (flat_pmax <= b)
        if not sel.any():
            return None, None
        mass = np.zeros(width)
        np.add.at(mass, flat_col[sel] - a, flat_p[sel])
        covered = np.zeros(width, dtype=np.int64)
        inner = sel & flat_interior
        np.add.at(covered, flat_col[inner] - a, 1)
        scope = (pmin >= a) & (pmax <= b)
        spanning = np.zeros(width + 1, dtype=np.int64)
        wide = pmax[scope] > pmin[scope]
        smin = pmin[scope][wide]
        smax = pmax[scope][wide]
        np.add.at(spanning, smin + 1 - a, 1)
        np.add.at(spanning, smax - a, -1)
        span_count = np.cumsum(spanning[:width])
        valid = span_count == covered
        return valid, mass

    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        if a > b or (a, b) in value:
            continue
        valid, mass = state_candidates(a, b)
        if valid is None:
            value[(a, b)] = 0.0
            choice[(a, b)] = None
            continue
        pending = []
        for j in np.nonzero(valid)[0]:
            col = a + int(j)
            if col > a and (a, col - 1) not in value:
                pending.append((a, col - 1))
            if col < b and (col + 1, b) not in value:
                pending.append((col + 1, b))
        if pending:
            stack.append((a, b))
            stack.extend(pending)
            continue
        best_val = np.inf
        best_col = None
        phi = entropy_terms(mass)
        for j in np.nonzero(valid)[0]:
            col = a + int(j)
            val = (
                phi[j]
                + value.get((a, col - 1), 0.0)
                + value.get((col + 1, b), 0.0)
            )
            if val < best_val - TIE_TOL:
                best_val = val
                best_col = col
        if best_col is None:
            raise InternalCheckError("no routable column in a non-empty interval")
        value[(a, b)] = best_val
        choice[(a, b)] = best_col

    walk = [(lo, hi)]
    while walk:
        a, b = walk.pop()
        if a > b or choice.get((a, b)) is None:
            continue
        col = choice[(a, b)]
        scope = (pmin >= a) & (pmax <= b)
        for i in np.nonzero(scope)[0]:
            if col in poss_sets[i]:
                assignment[i] = used[col]
        walk.append((a, col - 1))
        walk.append((col + 1, b))


def solve_pop_shannon(problem: PaddingProblem) -> tuple[DeterministicScheme, float]:
    """Deterministic scheme minimizing the output entropy.

    Files are grouped into contiguous runs sharing one output size; run
    ``[i, k]`` is feasible when the windows intersect (``l_k <= r_i``)
    and is padded to the smallest common column ``l_k``, which also
    minimizes the padding added.  ``D[i]`` is the best entropy for the
    suffix starting at file ``i``.
    """
    p = problem.files.frequencies
    n = problem.n
    lower = problem.lower
    upper = problem.upper
    prefix = np.concatenate([[0.0], np.cumsum(p)])

    best = np.zeros(n + 2)
    choice = np.zeros(n + 1, dtype=np.int64)
    for i in range(n, 0, -1):
        k_hi = int(np.searchsorted(lower, upper[i - 1], side="right"))
        ks = np.arange(i, k_hi + 1)
        masses = prefix[ks] - prefix[i - 1]
        vals = entropy_terms(masses) + best[ks + 1]
        pick = int(np.argmax(vals <= vals.min() + TIE_TOL))
        choice[i] = ks[pick]
        best[i] = vals[pick]

    assignment = np.zeros(n, dtype=np.int64)
    i = 1
    while i <= n:
        k = int(choice[i])
        assignment[i - 1 : k] = lower[k - 1]
        i = k + 1

    scheme = DeterministicScheme(tuple(int(c) for c in assignment))
    scheme.validate(problem)
    return scheme, float(best[1])
