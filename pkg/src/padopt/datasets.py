"""Dataset loading and synthetic corpus generation.

The on-disk dataset format is a UTF-8 CSV with header ``size,frequency``
(LF or CRLF).  The frequency column may hold raw access counts; the
loader renormalizes and logs a notice in that case.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError
from .problem import FileSet

DATASET_HEADER = ("size", "frequency")


def load_dataset(path) -> FileSet:
    """Parse a ``size,frequency`` CSV into a sorted, normalized file set."""
    with open(path, "r", encoding="utf-8-sig", newline="") as fh:
        return read_dataset(fh, name=str(path))


def read_dataset(fh, name: str = "<stream>") -> FileSet:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError(f"{name}: empty dataset") from None
    if tuple(h.strip().lower() for h in header) != DATASET_HEADER:
        raise ValidationError(
            f"{name}: expected header 'size,frequency', got {','.join(header)!r}"
        )
    sizes: list[int] = []
    freqs: list[float] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise ValidationError(f"{name}: malformed row at line {lineno}: {row!r}")
        try:
            size = int(row[0])
            freq = float(row[1])
        except ValueError:
            raise ValidationError(
                f"{name}: malformed row at line {lineno}: {row!r}"
            ) from None
        if size < 1:
            raise ValidationError(f"{name}: non-positive size at line {lineno}")
        if not np.isfinite(freq) or freq <= 0.0:
            raise ValidationError(f"{name}: non-positive frequency at line {lineno}")
        sizes.append(size)
        freqs.append(freq)
    if not sizes:
        raise ValidationError(f"{name}: dataset holds no rows")
    return FileSet.from_pairs(sizes, freqs)


def write_dataset(files: FileSet, fh) -> None:
    """Write a file set back out; frequencies keep full precision."""
    fh.write("size,frequency\n")
    for size, freq in zip(files.sizes, files.frequencies):
        fh.write(f"{int(size)},{float(freq)!r}\n")


def save_dataset(files: FileSet, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_dataset(files, fh)


def dataset_text(files: FileSet) -> str:
    buf = io.StringIO()
    write_dataset(files, buf)
    return buf.getvalue()


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters for a reproducible synthetic popularity corpus."""

    n: int
    size_min: int
    size_max: int
    zipf_exponent: float = 1.0
    seed: int = 0
    frequency_assignment: str = "random"

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("need at least one file")
        if not 1 <= self.size_min <= self.size_max:
            raise ValidationError("need 1 <= size_min <= size_max")
        if self.zipf_exponent <= 0.0:
            raise ValidationError("zipf exponent must be positive")
        if self.frequency_assignment not in ("random", "inverse-size"):
            raise ValidationError(
                "frequency_assignment must be 'random' or 'inverse-size'"
            )


def generate_synthetic(spec: SyntheticSpec) -> FileSet:
    """Deterministic synthetic corpus.

    Sizes are drawn log-uniformly over ``[size_min, size_max]`` and
    deduplicated by redrawing, so all n sizes are distinct.  Frequencies
    follow a Zipf law with the given exponent; ``random`` assignment
    shuffles the popularity ranks over the files, ``inverse-size`` gives
    the highest popularity to the smallest file.
    """
    if spec.size_max - spec.size_min + 1 < spec.n:
        raise ValidationError("size range cannot hold n distinct sizes")
    rng = np.random.default_rng(spec.seed)
    lo = np.log(spec.size_min)
    hi = np.log(spec.size_max + 1)

    collected: list[np.ndarray] = []
    seen: set[int] = set()
    have = 0
    while have < spec.n:
        draw = np.floor(np.exp(rng.random(max(spec.n, 1024)) * (hi - lo) + lo))
        draw = np.minimum(draw.astype(np.int64), spec.size_max)
        fresh = []
        for s in draw:
            s = int(s)
            if s not in seen:
                seen.add(s)
                fresh.append(s)
                if have + len(fresh) == spec.n:
                    break
        if fresh:
            collected.append(np.asarray(fresh, dtype=np.int64))
            have += len(fresh)
    sizes = np.sort(np.concatenate(collected))

    ranks = np.arange(1, spec.n + 1, dtype=np.float64)
    weights = ranks ** (-spec.zipf_exponent)
    weights /= weights.sum()
    if spec.frequency_assignment == "random":
        freqs = weights[rng.permutation(spec.n)]
    else:
        freqs = weights  # sizes ascend, so popularity descends with size
    return FileSet.from_pairs(sizes, freqs)
