"""Randomized (pad-per-request) scheme solvers.

:func:`solve_prp_renyi` builds the joint matrix that minimizes the sum
of column maxima over all randomized schemes.  It sweeps the alphabet
right to left, carrying a per-file budget (initially the frequency):
whenever a column is the left endpoint of some files' windows, those
files must spend their whole remaining budget there; every other file
that can still reach the column matches the largest such forced budget,
which provably never raises the eventual optimum.

:func:`reduce_bandwidth` then repacks each row as far left as possible
without letting any entry exceed its column's established maximum, so
the attacker's success probability is unchanged while the expected
padded size drops.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .exceptions import InternalCheckError
from .metrics import JointMatrix, posterior_vulnerability
from .problem import PaddingProblem

# Floating-point guard for residual budgets: anything this close to
# zero after a long subtraction chain is treated as spent.
RESIDUE_TOL = 1e-12


def solve_prp_renyi(problem: PaddingProblem) -> JointMatrix:
    """Joint matrix minimizing the sum of column maxima.

    With uniform frequencies (see
    :meth:`padopt.problem.PaddingProblem.with_uniform_frequencies`) this
    doubles as the defense for an unknown access distribution.
    """
    n = problem.n
    m = problem.m
    l0 = problem.lower - 1
    r0 = problem.upper - 1
    budget = problem.files.frequencies.copy()

    out_rows: list[np.ndarray] = []
    out_cols: list[np.ndarray] = []
    out_vals: list[np.ndarray] = []
    active = np.empty(0, dtype=np.int64)

    for j in range(m - 1, -1, -1):
        # Files whose window ends at j become reachable now; their
        # indices precede every already-active row.
        e0 = int(np.searchsorted(r0, j, side="left"))
        e1 = int(np.searchsorted(r0, j, side="right"))
        if e1 > e0:
            active = np.concatenate([np.arange(e0, e1, dtype=np.int64), active])
        t0 = int(np.searchsorted(l0, j, side="left"))
        # Active rows are sorted ascending and rows with a left endpoint
        # beyond j are long gone, so the forced block is the tail.
        sep = int(np.searchsorted(active, t0))
        forced = active[sep:]
        rest = active[:sep]
        if forced.size == 0:
            continue
        forced_vals = budget[forced]
        top = float(forced_vals.max())
        out_rows.append(forced.copy())
        out_cols.append(np.full(forced.size, j, dtype=np.int64))
        out_vals.append(forced_vals)
        budget[forced] = 0.0
        if rest.size:
            placed = np.minimum(budget[rest], top)
            out_rows.append(rest.copy())
            out_cols.append(np.full(rest.size, j, dtype=np.int64))
            out_vals.append(placed)
            budget[rest] -= placed
            np.maximum(budget, 0.0, out=budget)
            active = rest[budget[rest] > RESIDUE_TOL]
        else:
            active = rest

    if active.size:
        raise InternalCheckError("budget sweep left active rows behind")
    if budget.max(initial=0.0) > 1e-9:
        raise InternalCheckError("budget sweep left unplaced probability mass")

    rows = np.concatenate(out_rows) if out_rows else np.empty(0, dtype=np.int64)
    cols = np.concatenate(out_cols) if out_cols else np.empty(0, dtype=np.int64)
    vals = np.concatenate(out_vals) if out_vals else np.empty(0)
    keep = vals > 0.0
    matrix = sp.csr_matrix((vals[keep], (rows[keep], cols[keep])), shape=(n, m))
    joint = JointMatrix(problem, matrix)
    joint.validate()
    return joint


def reduce_bandwidth(problem: PaddingProblem, joint: JointMatrix) -> JointMatrix:
    """Repack every row leftward under the input's column maxima.

    The caps are computed once from the input matrix and never
    refreshed.  Each row is rebuilt left to right within its window,
    placing ``min(cap, remaining)`` until its mass is spent; the
    original row fit under the same caps, so the mass always fits.
    Expects a matrix produced by :func:`solve_prp_renyi`; on those the
    update preserves the posterior vulnerability exactly (checked) and
    never increases the expected padded size (checked).
    """
    caps = joint.column_maxima()
    cap_prefix = np.concatenate([[0.0], np.cumsum(caps)])
    l0 = problem.lower - 1
    r0 = problem.upper - 1
    row_sums = np.asarray(joint.matrix.sum(axis=1)).ravel()
    n = problem.n

    out_cols: list[np.ndarray] = []
    out_vals: list[np.ndarray] = []
    indptr = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        lo = int(l0[i])
        hi = int(r0[i])
        target = float(row_sums[i])
        base = cap_prefix[lo]
        # First window column where the running cap total reaches the mass.
        cut = int(np.searchsorted(cap_prefix[lo + 1 : hi + 2], base + target, side="left"))
        cut = min(cut, hi - lo)
        vals = caps[lo : lo + cut + 1].copy()
        remainder = target - (cap_prefix[lo + cut] - base)
        vals[cut] = max(remainder, 0.0)
        cols = np.arange(lo, lo + cut + 1, dtype=np.int64)
        keep = vals > 0.0
        vals = vals[keep]
        cols = cols[keep]
        out_cols.append(cols)
        out_vals.append(vals)
        indptr[i + 1] = indptr[i] + cols.size

    matrix = sp.csr_matrix(
        (np.concatenate(out_vals), np.concatenate(out_cols), indptr),
        shape=(n, problem.m),
    )
    repacked = JointMatrix(problem, matrix)
    repacked.validate()

    v_in = posterior_vulnerability(joint)
    v_out = posterior_vulnerability(repacked)
    if abs(v_in - v_out) > 1e-9:
        raise InternalCheckError(
            f"bandwidth update changed the vulnerability: {v_in!r} -> {v_out!r}"
        )
    z = problem.alphabet.sizes
    before = float(joint.output_masses() @ z)
    after = float(repacked.output_masses() @ z)
    if after > before + 1e-6:
        raise InternalCheckError("bandwidth update increased the expected size")
    return repacked
