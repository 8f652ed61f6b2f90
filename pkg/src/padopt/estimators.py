"""Scikit-learn style wrappers around the padding solvers.

Each estimator fits on a file catalogue, an array of shape (n, 2) whose
columns are size (bytes) and access frequency (or raw counts), and
exposes the fitted scheme through ``transform``: given file indices, it
returns the padded size served for each request.  Deterministic
algorithms always serve the same size; per-request algorithms sample
from the fitted row distributions.

The wrappers compose with the usual ecosystem machinery: ``get_params``
and ``set_params`` work, ``clone`` works, and ``score`` returns the
negated min-entropy leakage so a grid search over ``c`` prefers the
most private setting.

>>> pad = PopRenyiPadding(c=1.1).fit(catalogue)
>>> pad.report_.renyi_bits
>>> pad.transform([0, 4, 2])
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import ValidationError
from .metrics import evaluate
from .pop import refine_shannon, solve_pop_renyi, solve_pop_shannon
from .problem import (
    FileSet,
    OutputAlphabet,
    problem_from_multiplier,
    problem_from_per_file_multipliers,
    server_identity_reduction,
)
from .prp import reduce_bandwidth, solve_prp_renyi


class BasePadding(BaseEstimator):
    """Shared fitting and request-padding plumbing.

    Parameters
    ----------
    c : float
        Multiplicative padding bound; each file may grow to at most
        ``c`` times its size.
    per_file_c : array-like or None
        Per-file bounds overriding ``c``.
    shared_alphabet : array-like or None
        Increasing output sizes shared across servers.  When set, the
        problem is first reduced onto this alphabet (``c`` still caps
        the padding against the original sizes).
    strict_alphabet_bound : bool
        Use the strict lifted-size variant of the shared-alphabet upper
        bound instead of the default original-size rule.
    secret : {"file", "size"}
        Granularity used for the fitted leakage report.
    random_state : int or None
        Seeds the per-request sampling stream of randomized schemes.
    """

    def __init__(
        self,
        c=1.1,
        per_file_c=None,
        shared_alphabet=None,
        strict_alphabet_bound=False,
        secret="file",
        random_state=None,
    ):
        self.c = c
        self.per_file_c = per_file_c
        self.shared_alphabet = shared_alphabet
        self.strict_alphabet_bound = strict_alphabet_bound
        self.secret = secret
        self.random_state = random_state

    def _build_problem(self, files: FileSet):
        if self.per_file_c is not None and self.shared_alphabet is not None:
            raise ValidationError(
                "per_file_c and shared_alphabet cannot be combined"
            )
        if self.shared_alphabet is not None:
            return server_identity_reduction(
                files,
                OutputAlphabet(np.asarray(self.shared_alphabet, dtype=np.int64)),
                float(self.c),
                strict_lstar_bound=self.strict_alphabet_bound,
            )
        if self.per_file_c is not None:
            return problem_from_per_file_multipliers(files, self.per_file_c)
        return problem_from_multiplier(files, float(self.c))

    def _solve(self, problem):
        raise NotImplementedError

    def fit(self, X, y=None):
        """Fit the padding scheme on a catalogue of (size, frequency) rows."""
        X = check_array(X, dtype=np.float64, ensure_min_features=2)
        if X.shape[1] != 2:
            raise ValidationError("expected exactly two columns: size, frequency")
        sizes = X[:, 0]
        if np.any(sizes != np.round(sizes)):
            raise ValidationError("sizes must be integers")
        files = FileSet.from_pairs(sizes.astype(np.int64), X[:, 1])
        problem = self._build_problem(files)
        self.problem_ = problem
        self.joint_ = self._solve(problem)
        self.report_ = evaluate(self.joint_, secret=self.secret)
        self.n_features_in_ = 2
        self._rng = np.random.default_rng(self.random_state)
        return self

    def _served_sizes(self, indices: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def transform(self, X):
        """Padded size served for each requested file index."""
        check_is_fitted(self, "joint_")
        idx = np.asarray(X)
        if idx.ndim == 2 and idx.shape[1] == 1:
            idx = idx.ravel()
        if idx.ndim != 1:
            raise ValidationError("expected a 1-d array of file indices")
        if np.any(idx != np.round(idx)):
            raise ValidationError("file indices must be integers")
        idx = idx.astype(np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= self.problem_.n):
            raise ValidationError("file index out of range")
        return self._served_sizes(idx)

    def fit_transform(self, X, y=None):
        """Fit on a catalogue, then serve one request per file in order."""
        self.fit(X, y)
        return self.transform(np.arange(self.problem_.n))

    def adversary_guess(self, padded_sizes):
        """The one-try attacker's file guess for each observed size."""
        check_is_fitted(self, "joint_")
        z = self.problem_.alphabet.sizes
        padded = np.asarray(padded_sizes, dtype=np.int64).ravel()
        cols = np.searchsorted(z, padded)
        if np.any(cols >= len(z)) or np.any(z[np.minimum(cols, len(z) - 1)] != padded):
            raise ValidationError("observed size is not in the output alphabet")
        dense = self.joint_.to_dense()
        return np.argmax(dense[:, cols], axis=0)

    def score(self, X=None, y=None):
        """Negated min-entropy leakage (higher is more private)."""
        check_is_fitted(self, "report_")
        return -self.report_.renyi_bits


class _DeterministicPadding(BasePadding):
    def _served_sizes(self, indices):
        cols = np.asarray(self.scheme_.assignment, dtype=np.int64) - 1
        return self.problem_.alphabet.sizes[cols[indices]]


class PopRenyiPadding(_DeterministicPadding):
    """Pad-once scheme minimizing the one-try attacker's success."""

    def _solve(self, problem):
        self.scheme_, self.objective_ = solve_pop_renyi(problem)
        return self.scheme_.to_joint(problem)


class PopRenyiShannonPadding(_DeterministicPadding):
    """Attacker-optimal pad-once scheme, re-grouped for low Shannon leakage."""

    def _solve(self, problem):
        base, self.objective_ = solve_pop_renyi(problem)
        self.scheme_ = refine_shannon(problem, base)
        return self.scheme_.to_joint(problem)


class PopShannonPadding(_DeterministicPadding):
    """Pad-once scheme minimizing Shannon leakage (classic baseline)."""

    def _solve(self, problem):
        self.scheme_, self.shannon_bits_ = solve_pop_shannon(problem)
        return self.scheme_.to_joint(problem)


class _RandomizedPadding(BasePadding):
    def _served_sizes(self, indices):
        matrix = self.joint_.matrix
        z = self.problem_.alphabet.sizes
        out = np.empty(indices.size, dtype=np.int64)
        for pos, i in enumerate(indices):
            start, end = matrix.indptr[i], matrix.indptr[i + 1]
            probs = matrix.data[start:end]
            col = self._rng.choice(matrix.indices[start:end], p=probs / probs.sum())
            out[pos] = z[col]
        return out


class PrpRenyiPadding(_RandomizedPadding):
    """Per-request scheme minimizing the one-try attacker's success."""

    def _solve(self, problem):
        return solve_prp_renyi(problem)


class PrpRenyiBandwidthPadding(_RandomizedPadding):
    """Attacker-optimal per-request scheme repacked for low average padding."""

    def _solve(self, problem):
        return reduce_bandwidth(problem, solve_prp_renyi(problem))
