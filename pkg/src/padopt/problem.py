"""Padding problem data model.

A padding problem bundles a catalogue of files (sizes and access
frequencies), an increasing alphabet of allowed output sizes, and one
index window ``[l_i, r_i]`` per file restricting which alphabet entries
the file may be padded to.  Windows come from a global multiplicative
bound, from per-file bounds, or from a multi-server shared alphabet.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError

logger = logging.getLogger(__name__)

# Absolute tolerance for probability sums and equality checks.
PROB_TOL = 1e-9
# Deviations larger than this trigger a renormalization notice
# (raw access counts instead of frequencies are a common input).
RENORM_NOTICE_TOL = 1e-6


@dataclass(frozen=True)
class FileRecord:
    """One file: its size in bytes and its access frequency."""

    size: int
    frequency: float

    def __post_init__(self):
        if self.size < 1:
            raise ValidationError(f"file size must be >= 1, got {self.size}")
        if not 0.0 < self.frequency <= 1.0:
            raise ValidationError(
                f"file frequency must be in (0, 1], got {self.frequency}"
            )


@dataclass(frozen=True)
class FileSet:
    """Files sorted non-decreasingly by size, frequencies summing to 1.

    Backed by two read-only arrays so that large catalogues stay cheap.
    Use :meth:`from_pairs` or :meth:`from_records` to construct; both
    stable-sort by size and renormalize frequency sums (with a logged
    notice when the deviation exceeds ``1e-6``, which indicates the
    input held raw counts).
    """

    sizes: np.ndarray
    frequencies: np.ndarray

    def __post_init__(self):
        sizes = np.asarray(self.sizes, dtype=np.int64)
        freqs = np.asarray(self.frequencies, dtype=np.float64)
        if sizes.ndim != 1 or freqs.ndim != 1 or sizes.shape != freqs.shape:
            raise ValidationError("sizes and frequencies must be 1-d and equal length")
        if sizes.size < 1:
            raise ValidationError("a file set needs at least one file")
        if np.any(sizes < 1):
            raise ValidationError("all file sizes must be >= 1")
        if np.any(~np.isfinite(freqs)) or np.any(freqs <= 0.0):
            raise ValidationError("all file frequencies must be finite and > 0")
        if np.any(np.diff(sizes) < 0):
            raise ValidationError("files must be sorted non-decreasingly by size")
        if abs(float(freqs.sum()) - 1.0) > PROB_TOL:
            raise ValidationError(
                f"frequencies must sum to 1 within {PROB_TOL}, got {freqs.sum()!r}"
            )
        sizes.flags.writeable = False
        freqs.flags.writeable = False
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "frequencies", freqs)

    @classmethod
    def from_pairs(cls, sizes, frequencies) -> "FileSet":
        """Build from parallel size/frequency sequences.

        Stable-sorts by size (ties keep input order) and divides the
        frequency column by its sum when it does not already sum to 1.
        """
        raw = np.asarray(sizes)
        if raw.dtype.kind == "f":
            if np.any(raw != np.round(raw)):
                raise ValidationError("file sizes must be integers")
        sizes = np.asarray(raw, dtype=np.int64)
        freqs = np.asarray(frequencies, dtype=np.float64)
        if sizes.ndim != 1 or freqs.ndim != 1 or sizes.shape != freqs.shape:
            raise ValidationError("sizes and frequencies must be 1-d and equal length")
        if sizes.size < 1:
            raise ValidationError("a file set needs at least one file")
        if np.any(~np.isfinite(freqs)) or np.any(freqs <= 0.0):
            raise ValidationError("all file frequencies must be finite and > 0")
        order = np.argsort(sizes, kind="stable")
        sizes = sizes[order]
        freqs = freqs[order]
        total = float(freqs.sum())
        if abs(total - 1.0) > PROB_TOL:
            if abs(total - 1.0) > RENORM_NOTICE_TOL:
                logger.info(
                    "frequency column sums to %g; renormalizing (counts input?)", total
                )
            freqs = freqs / total
        return cls(sizes, freqs)

    @classmethod
    def from_records(cls, records) -> "FileSet":
        records = list(records)
        return cls.from_pairs(
            [r.size for r in records], [r.frequency for r in records]
        )

    def __len__(self) -> int:
        return int(self.sizes.size)

    def record(self, i: int) -> FileRecord:
        """The i-th file (0-based) as a :class:`FileRecord`."""
        return FileRecord(int(self.sizes[i]), float(self.frequencies[i]))

    def with_frequencies(self, frequencies) -> "FileSet":
        return FileSet.from_pairs(self.sizes.copy(), frequencies)


@dataclass(frozen=True)
class OutputAlphabet:
    """Strictly increasing sequence of allowed output sizes."""

    sizes: np.ndarray

    def __post_init__(self):
        sizes = np.asarray(self.sizes, dtype=np.int64)
        if sizes.ndim != 1 or sizes.size < 1:
            raise ValidationError("alphabet must be a non-empty 1-d sequence")
        if np.any(sizes < 1):
            raise ValidationError("alphabet sizes must be >= 1")
        if np.any(np.diff(sizes) <= 0):
            raise ValidationError("alphabet sizes must be strictly increasing")
        sizes.flags.writeable = False
        object.__setattr__(self, "sizes", sizes)

    def __len__(self) -> int:
        return int(self.sizes.size)


@dataclass(frozen=True)
class ConstraintSequence:
    """Per-file alphabet index windows ``[l_i, r_i]``, 1-based.

    Both endpoint sequences are non-decreasing, ``l_1 = 1`` and
    ``l_n = r_n`` equal the alphabet length.  Construct through
    :func:`validate_constraints`.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=np.int64)
        hi = np.asarray(self.upper, dtype=np.int64)
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(int(l), int(r)) for l, r in zip(self.lower, self.upper)]

    def __len__(self) -> int:
        return int(self.lower.size)


def validate_constraints(pairs, alphabet_len: int) -> ConstraintSequence:
    """Check a window sequence and wrap it as a :class:`ConstraintSequence`.

    Reports the first violated requirement: non-monotone ``l``,
    non-monotone ``r``, ``l_i > r_i``, ``l_1 != 1``, last window not
    pinned to the alphabet end, or an index outside ``[1, alphabet_len]``.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValidationError("constraint sequence must be non-empty")
    lo = np.asarray([p[0] for p in pairs], dtype=np.int64)
    hi = np.asarray([p[1] for p in pairs], dtype=np.int64)
    n = lo.size
    bad = np.nonzero(np.diff(lo) < 0)[0]
    if bad.size:
        i = int(bad[0])
        raise ValidationError(
            f"l not non-decreasing at file {i + 2}: l[{i + 1}]={lo[i]} > l[{i + 2}]={lo[i + 1]}"
        )
    bad = np.nonzero(np.diff(hi) < 0)[0]
    if bad.size:
        i = int(bad[0])
        raise ValidationError(
            f"r not non-decreasing at file {i + 2}: r[{i + 1}]={hi[i]} > r[{i + 2}]={hi[i + 1]}"
        )
    bad = np.nonzero(lo > hi)[0]
    if bad.size:
        i = int(bad[0])
        raise ValidationError(f"l_i > r_i at file {i + 1}: [{lo[i]}, {hi[i]}]")
    if lo[0] != 1:
        raise ValidationError(f"l_1 must be 1, got {lo[0]}")
    if lo[n - 1] != alphabet_len or hi[n - 1] != alphabet_len:
        raise ValidationError(
            f"last window must pin to the alphabet end ({alphabet_len}), "
            f"got [{lo[n - 1]}, {hi[n - 1]}]"
        )
    if np.any(lo < 1) or np.any(hi > alphabet_len):
        bad = np.nonzero((lo < 1) | (hi > alphabet_len))[0]
        i = int(bad[0])
        raise ValidationError(
            f"window index out of range at file {i + 1}: [{lo[i]}, {hi[i]}] "
            f"not within [1, {alphabet_len}]"
        )
    return ConstraintSequence(lo, hi)


@dataclass(frozen=True)
class PaddingProblem:
    """A file set, an output alphabet, and a valid window per file.

    ``original_sizes`` carries the pre-reduction sizes after a
    shared-alphabet reduction so that bandwidth accounting can charge
    padding against what the server actually stores.
    """

    files: FileSet
    alphabet: OutputAlphabet
    constraints: ConstraintSequence
    original_sizes: np.ndarray | None = field(default=None)

    def __post_init__(self):
        n = len(self.files)
        if len(self.constraints) != n:
            raise ValidationError("one constraint window per file is required")
        z = self.alphabet.sizes
        lo = self.constraints.lower
        reachable = z[lo - 1] >= self.files.sizes
        if not np.all(reachable):
            i = int(np.nonzero(~reachable)[0][0])
            raise ValidationError(
                f"file {i + 1} (size {self.files.sizes[i]}) cannot be padded to its "
                f"smallest allowed output {z[lo[i] - 1]}"
            )
        if self.original_sizes is not None:
            orig = np.asarray(self.original_sizes, dtype=np.int64)
            if orig.shape != self.files.sizes.shape:
                raise ValidationError("original_sizes must have one entry per file")
            if np.any(orig < 1):
                raise ValidationError("original sizes must be >= 1")
            if np.any(orig > self.files.sizes):
                i = int(np.nonzero(orig > self.files.sizes)[0][0])
                raise ValidationError(
                    f"original size exceeds reduced size at file {i + 1}"
                )
            orig.flags.writeable = False
            object.__setattr__(self, "original_sizes", orig)

    # Convenience views used throughout the solvers.
    @property
    def n(self) -> int:
        return len(self.files)

    @property
    def m(self) -> int:
        return len(self.alphabet)

    @property
    def lower(self) -> np.ndarray:
        """1-based left window endpoints."""
        return self.constraints.lower

    @property
    def upper(self) -> np.ndarray:
        """1-based right window endpoints."""
        return self.constraints.upper

    @property
    def billed_sizes(self) -> np.ndarray:
        """Sizes bandwidth is measured against (original when present)."""
        if self.original_sizes is not None:
            return self.original_sizes
        return self.files.sizes

    def with_uniform_frequencies(self) -> "PaddingProblem":
        """Same constraints with all frequencies set to 1/n.

        This is the variant to use when the access distribution is
        unknown and the defender assumes uniform popularity.
        """
        n = self.n
        files = self.files.with_frequencies(np.full(n, 1.0 / n))
        return PaddingProblem(files, self.alphabet, self.constraints, self.original_sizes)


def problem_from_multiplier(files: FileSet, c: float) -> PaddingProblem:
    """Windows from one multiplicative bound: pad within ``[|e|, c*|e|]``.

    The alphabet is the set of distinct file sizes (padding to anything
    else is never useful).  ``l_i`` is the index of the file's own size
    and ``r_i`` the largest alphabet index not exceeding ``c * |e_i|``.
    The bound is evaluated in 64-bit floats.
    """
    if not np.isfinite(c) or c < 1.0:
        raise ValidationError(f"padding multiplier must be >= 1, got {c}")
    z = np.unique(files.sizes)
    lo = np.searchsorted(z, files.sizes, side="left") + 1
    hi = np.searchsorted(z, c * files.sizes, side="right")
    constraints = validate_constraints(list(zip(lo, hi)), len(z))
    return PaddingProblem(files, OutputAlphabet(z), constraints)


def problem_from_per_file_multipliers(files: FileSet, c_list) -> PaddingProblem:
    """Windows from one multiplicative bound per file.

    Arbitrary per-file bounds can produce a non-monotone ``r`` sequence;
    such inputs are rejected (naming the offending file) rather than
    silently clamped, since clamping would change the advertised
    bandwidth guarantee.
    """
    c = np.asarray(c_list, dtype=np.float64)
    if c.ndim != 1 or c.size != len(files):
        raise ValidationError("need exactly one multiplier per file")
    if np.any(~np.isfinite(c)) or np.any(c < 1.0):
        i = int(np.nonzero(~np.isfinite(c) | (c < 1.0))[0][0])
        raise ValidationError(f"multiplier for file {i + 1} must be >= 1, got {c[i]}")
    z = np.unique(files.sizes)
    lo = np.searchsorted(z, files.sizes, side="left") + 1
    hi = np.searchsorted(z, c * files.sizes, side="right")
    constraints = validate_constraints(list(zip(lo, hi)), len(z))
    return PaddingProblem(files, OutputAlphabet(z), constraints)


def server_identity_reduction(
    files: FileSet,
    shared_alphabet: OutputAlphabet,
    c: float,
    strict_lstar_bound: bool = False,
) -> PaddingProblem:
    """Reduce a shared-alphabet (multi-server) instance to the window form.

    Every cooperating server pads onto the same alphabet ``Z`` so that an
    observed padded size does not identify the server.  Each file is
    first lifted to ``L*_i``, the smallest alphabet value at least its
    size; the reduced problem pads the lifted files within the alphabet
    of distinct ``L*`` values, while the upper bound ``z <= c * |e_i|``
    keeps being checked against the original size.  Feasibility requires
    every original window ``[|e_i|, c*|e_i|]`` to contain some alphabet
    value.

    ``strict_lstar_bound`` switches to the variant that bounds strictly
    against the lifted size (``z < c * L*_i``) instead; it exists for
    comparison and can reject instances the default accepts (it always
    rejects ``c = 1``).
    """
    if not np.isfinite(c) or c < 1.0:
        raise ValidationError(f"padding multiplier must be >= 1, got {c}")
    z = shared_alphabet.sizes
    sizes = files.sizes
    pos = np.searchsorted(z, sizes, side="left")
    limit = c * sizes
    infeasible = (pos >= len(z)) | (z[np.minimum(pos, len(z) - 1)] > limit)
    if np.any(infeasible):
        i = int(np.nonzero(infeasible)[0][0])
        raise ValidationError(
            f"file {i + 1} has no shared-alphabet value inside "
            f"[{sizes[i]}, {limit[i]:g}]"
        )
    lifted = z[pos]
    reduced_alphabet = np.unique(lifted)
    lo = np.searchsorted(reduced_alphabet, lifted, side="left") + 1
    if strict_lstar_bound:
        hi = np.searchsorted(reduced_alphabet, c * lifted.astype(np.float64), side="left")
    else:
        hi = np.searchsorted(reduced_alphabet, limit, side="right")
    constraints = validate_constraints(list(zip(lo, hi)), len(reduced_alphabet))
    reduced_files = FileSet.from_pairs(lifted, files.frequencies)
    return PaddingProblem(
        reduced_files,
        OutputAlphabet(reduced_alphabet),
        constraints,
        original_sizes=sizes.copy(),
    )
