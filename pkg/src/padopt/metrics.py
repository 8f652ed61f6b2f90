"""Leakage and bandwidth measures for padding schemes.

A scheme is represented by its joint matrix ``I`` with
``I[i, j] = p_i * P(file i is padded to alphabet entry j)``.  Rows sum
to the file frequencies; deterministic schemes are the special case
with a single non-zero per row.  The one-try attacker's success
probability is the sum of column maxima of ``I``, and the min-entropy
leakage is the log-ratio of that posterior to the prior ``max_i p_i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .exceptions import InternalCheckError, ValidationError
from .problem import PROB_TOL, PaddingProblem

# Columns count as reachable for a file when the column maximum is at
# least the file's frequency minus this slack.
MAX_MATCH_TOL = 1e-12


def entropy_terms(masses: np.ndarray) -> np.ndarray:
    """Elementwise ``-x * log2(x)`` with ``0 log 0 = 0``."""
    masses = np.asarray(masses, dtype=np.float64)
    out = np.zeros_like(masses)
    pos = masses > 0.0
    out[pos] = -masses[pos] * np.log2(masses[pos])
    return out


def entropy_bits(masses) -> float:
    """Shannon entropy of a (sub-)distribution, in bits."""
    return float(entropy_terms(np.asarray(masses)).sum())


@dataclass(frozen=True)
class DeterministicScheme:
    """One alphabet column (1-based) per file."""

    assignment: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))

    def __len__(self) -> int:
        return len(self.assignment)

    def validate(self, problem: PaddingProblem) -> None:
        cols = np.asarray(self.assignment, dtype=np.int64)
        if cols.size != problem.n:
            raise ValidationError("assignment length must equal the number of files")
        bad = (cols < problem.lower) | (cols > problem.upper)
        if np.any(bad):
            i = int(np.nonzero(bad)[0][0])
            raise ValidationError(
                f"file {i + 1} assigned to column {cols[i]} outside "
                f"[{problem.lower[i]}, {problem.upper[i]}]"
            )

    def to_joint(self, problem: PaddingProblem) -> "JointMatrix":
        self.validate(problem)
        cols = np.asarray(self.assignment, dtype=np.int64) - 1
        rows = np.arange(problem.n)
        matrix = sp.csr_matrix(
            (problem.files.frequencies.copy(), (rows, cols)),
            shape=(problem.n, problem.m),
        )
        return JointMatrix(problem, matrix)


@dataclass(frozen=True)
class JointMatrix:
    """Sparse n x m joint matrix tied to its problem."""

    problem: PaddingProblem
    matrix: sp.csr_matrix

    def __post_init__(self):
        matrix = sp.csr_matrix(self.matrix, dtype=np.float64)
        matrix.sum_duplicates()
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_dense(cls, problem: PaddingProblem, entries) -> "JointMatrix":
        joint = cls(problem, sp.csr_matrix(np.asarray(entries, dtype=np.float64)))
        joint.validate()
        return joint

    def validate(self, tol: float = PROB_TOL) -> None:
        """Check row sums against frequencies and support against windows."""
        m = self.matrix
        if m.shape != (self.problem.n, self.problem.m):
            raise ValidationError("joint matrix shape does not match the problem")
        if np.any(m.data < 0.0):
            raise ValidationError("joint matrix entries must be non-negative")
        sums = np.asarray(m.sum(axis=1)).ravel()
        off = np.abs(sums - self.problem.files.frequencies)
        if np.any(off > tol):
            i = int(np.argmax(off))
            raise ValidationError(
                f"row {i + 1} sums to {sums[i]!r}, expected "
                f"{self.problem.files.frequencies[i]!r}"
            )
        rows = np.repeat(np.arange(self.problem.n), np.diff(m.indptr))
        cols = m.indices + 1
        positive = m.data > 0.0
        bad = positive & (
            (cols < self.problem.lower[rows]) | (cols > self.problem.upper[rows])
        )
        if np.any(bad):
            k = int(np.nonzero(bad)[0][0])
            raise ValidationError(
                f"file {rows[k] + 1} has mass on column {cols[k]} outside "
                f"[{self.problem.lower[rows[k]]}, {self.problem.upper[rows[k]]}]"
            )

    def column_maxima(self) -> np.ndarray:
        """Largest entry of each column (0 for empty columns)."""
        if self.matrix.nnz == 0:
            return np.zeros(self.problem.m)
        maxima = self.matrix.max(axis=0)
        return np.maximum(np.asarray(maxima.todense()).ravel(), 0.0)

    def output_masses(self) -> np.ndarray:
        """Total probability landing on each alphabet entry."""
        return np.asarray(self.matrix.sum(axis=0)).ravel()

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def to_assignment(self) -> DeterministicScheme:
        """Read back a deterministic scheme (error if any row is split)."""
        m = self.matrix
        counts = np.diff(m.indptr)
        if np.any(counts != 1):
            i = int(np.nonzero(counts != 1)[0][0])
            raise ValidationError(f"row {i + 1} is not deterministic")
        return DeterministicScheme(tuple(int(c) + 1 for c in m.indices))


def _size_class_matrix(problem: PaddingProblem) -> sp.csr_matrix:
    _, inverse = np.unique(problem.files.sizes, return_inverse=True)
    n = problem.n
    return sp.csr_matrix(
        (np.ones(n), (inverse, np.arange(n))), shape=(int(inverse.max()) + 1, n)
    )


def prior_vulnerability(joint: JointMatrix, secret: str = "file") -> float:
    """Best blind guess success probability.

    Parameters
    ----------
    joint : JointMatrix
    secret : {"file", "size"}
        What the attacker tries to identify.  ``"file"`` treats every
        record as a distinct secret; ``"size"`` pools files that share
        a size into one secret class.
    """
    p = joint.problem.files.frequencies
    if secret == "file":
        return float(p.max())
    if secret == "size":
        group = _size_class_matrix(joint.problem)
        return float((group @ p).max())
    raise ValidationError(f"secret must be 'file' or 'size', got {secret!r}")


def posterior_vulnerability(joint: JointMatrix, secret: str = "file") -> float:
    """One-try attacker success probability: the sum of column maxima."""
    if secret == "file":
        return float(joint.column_maxima().sum())
    if secret == "size":
        group = _size_class_matrix(joint.problem)
        grouped = group @ joint.matrix
        if grouped.nnz == 0:
            return 0.0
        maxima = np.asarray(grouped.max(axis=0).todense()).ravel()
        return float(np.maximum(maxima, 0.0).sum())
    raise ValidationError(f"secret must be 'file' or 'size', got {secret!r}")


def renyi_min_leakage(joint: JointMatrix, secret: str = "file") -> float:
    """Min-entropy leakage in bits: log2(posterior / prior)."""
    post = posterior_vulnerability(joint, secret)
    prior = prior_vulnerability(joint, secret)
    return float(np.log2(post / prior))


def shannon_leakage(joint: JointMatrix) -> float:
    """Mutual information between file identity and padded size, in bits.

    Computed as ``H(output) - sum_i p_i H(row_i / p_i)``.  For a
    deterministic scheme every row is a point mass, so the conditional
    term vanishes and the result is exactly the output entropy.
    """
    m = joint.matrix
    out_entropy = entropy_bits(joint.output_masses())
    if m.nnz == 0:
        return 0.0
    row_sums = np.asarray(m.sum(axis=1)).ravel()
    per_entry_row_sum = np.repeat(row_sums, np.diff(m.indptr))
    data = m.data
    pos = data > 0.0
    conditional = float(
        -(data[pos] * np.log2(data[pos] / per_entry_row_sum[pos])).sum()
    )
    return max(out_entropy - conditional, 0.0)


def bandwidth_report(joint: JointMatrix) -> tuple[float, float, float]:
    """(expected size before, expected size after, percent increase)."""
    problem = joint.problem
    before = float(problem.billed_sizes @ problem.files.frequencies)
    after = float(joint.output_masses() @ problem.alphabet.sizes)
    percent = 100.0 * (after - before) / before
    return before, after, percent


@dataclass(frozen=True)
class LeakageReport:
    """Every measure the benchmark figures need, for one (problem, scheme)."""

    prior_vulnerability: float
    posterior_vulnerability: float
    renyi_bits: float
    shannon_bits: float
    expected_size_before: float
    expected_size_after: float
    bandwidth_increase_percent: float

    def __post_init__(self):
        ratio = np.log2(self.posterior_vulnerability / self.prior_vulnerability)
        if abs(self.renyi_bits - ratio) > PROB_TOL:
            raise InternalCheckError("report fields are mutually inconsistent")
        if self.expected_size_after < self.expected_size_before - 1e-6:
            raise InternalCheckError("padding cannot shrink the expected size")

    def to_dict(self) -> dict:
        return {
            "prior_vulnerability": self.prior_vulnerability,
            "posterior_vulnerability": self.posterior_vulnerability,
            "renyi_bits": self.renyi_bits,
            "shannon_bits": self.shannon_bits,
            "expected_size_before": self.expected_size_before,
            "expected_size_after": self.expected_size_after,
            "bandwidth_increase_percent": self.bandwidth_increase_percent,
        }


def evaluate(joint: JointMatrix, secret: str = "file") -> LeakageReport:
    """Bundle all measures for one scheme into a report."""
    prior = prior_vulnerability(joint, secret)
    post = posterior_vulnerability(joint, secret)
    before, after, percent = bandwidth_report(joint)
    return LeakageReport(
        prior_vulnerability=prior,
        posterior_vulnerability=post,
        renyi_bits=float(np.log2(post / prior)),
        shannon_bits=shannon_leakage(joint),
        expected_size_before=before,
        expected_size_after=after,
        bandwidth_increase_percent=percent,
    )
