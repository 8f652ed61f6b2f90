"""Seeded simulation of the one-try attacker.

The attacker knows the joint matrix.  Seeing a padded size, it names
the file with the largest joint mass in that column (lowest index on
ties).  The empirical success rate converges to the sum of column
maxima, which is exactly what the solvers minimize.

Randomness comes from numpy's PCG64 via ``default_rng(seed)``; each
simulation owns one generator seeded directly with the caller's seed,
so a trace is a pure function of (problem, scheme, trials, seed) and
reproduces bit-for-bit across platforms.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError
from .metrics import JointMatrix, posterior_vulnerability

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AttackTrace:
    """Empirical success rates at increasing trial counts."""

    trials: int
    seed: int
    checkpoints: tuple[tuple[int, float], ...]
    theoretical_optimum: float

    @property
    def final_rate(self) -> float:
        return self.checkpoints[-1][1]


def simulate_attacker(
    problem,
    joint: JointMatrix,
    trials: int,
    seed: int = 0,
    checkpoint_every: int = 1000,
) -> AttackTrace:
    """Run one-try attacks against a scheme and record the success curve.

    Each trial draws a file with its access frequency, draws the padded
    size from the file's row distribution (jointly: one draw from the
    matrix entries), and scores the attacker's fixed per-column guess.

    Parameters
    ----------
    problem : PaddingProblem
        Owning problem of ``joint`` (kept explicit for symmetry with the
        solvers; must match).
    joint : JointMatrix
        Scheme under attack.
    trials : int
        Number of simulated transfers, >= 1.
    seed : int
        Seed for the simulation's private PCG64 stream.
    checkpoint_every : int
        Spacing of the recorded running success rates.
    """
    if trials < 1:
        raise ValidationError("at least one trial is required")
    if checkpoint_every < 1:
        raise ValidationError("checkpoint spacing must be >= 1")
    if joint.problem is not problem:
        joint = JointMatrix(problem, joint.matrix)
        joint.validate()

    coo = joint.matrix.tocoo()
    entry_rows = coo.row
    entry_cols = coo.col
    weights = coo.data / coo.data.sum()

    # Per-column guess: heaviest entry, lowest file on exact ties.
    order = np.lexsort((entry_rows, -coo.data, entry_cols))
    first = np.ones(order.size, dtype=bool)
    first[1:] = entry_cols[order][1:] != entry_cols[order][:-1]
    guess = np.full(problem.m, -1, dtype=np.int64)
    guess[entry_cols[order][first]] = entry_rows[order][first]

    rng = np.random.default_rng(seed)
    drawn = rng.choice(weights.size, size=trials, replace=True, p=weights)
    success = guess[entry_cols[drawn]] == entry_rows[drawn]

    marks = np.arange(checkpoint_every, trials + 1, checkpoint_every)
    if marks.size == 0 or marks[-1] != trials:
        marks = np.append(marks, trials)
    running = np.cumsum(success)
    checkpoints = tuple(
        (int(t), float(running[t - 1] / t)) for t in marks
    )

    optimum = posterior_vulnerability(joint)
    final = checkpoints[-1][1]
    stderr = np.sqrt(max(optimum * (1.0 - optimum), 1e-300) / trials)
    if abs(final - optimum) > 5.0 * stderr and optimum not in (0.0, 1.0):
        logger.warning(
            "attacker success %.6f is more than 5 standard errors from the "
            "expected %.6f at %d trials",
            final,
            optimum,
            trials,
        )
    return AttackTrace(
        trials=int(trials),
        seed=int(seed),
        checkpoints=checkpoints,
        theoretical_optimum=float(optimum),
    )
