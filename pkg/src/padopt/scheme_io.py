"""Scheme documents: a JSON round-trip format for padding schemes.

Rows have variable length (one choice per reachable output size), so
schemes use a structured document instead of CSV.  Frequencies and
probabilities are serialized as decimal strings with 17 significant
digits, which makes the round trip value-exact for 64-bit floats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .exceptions import ValidationError
from .metrics import JointMatrix, LeakageReport, evaluate
from .problem import (
    ConstraintSequence,
    FileSet,
    OutputAlphabet,
    PaddingProblem,
    validate_constraints,
)

FORMAT_TAG = "padopt-scheme/1"


def _dec(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class SchemeDocument:
    """A scheme as loaded from disk, with its provenance."""

    algorithm: str
    constraint_source: dict
    joint: JointMatrix
    report: LeakageReport


def scheme_to_dict(
    joint: JointMatrix, algorithm: str, constraint_source: dict | None = None
) -> dict:
    problem = joint.problem
    z = problem.alphabet.sizes
    matrix = joint.matrix
    rows = []
    for i in range(problem.n):
        start, end = matrix.indptr[i], matrix.indptr[i + 1]
        choices = [
            {
                "column": int(c) + 1,
                "size": int(z[c]),
                "probability": _dec(v),
            }
            for c, v in zip(matrix.indices[start:end], matrix.data[start:end])
        ]
        rows.append(
            {
                "size": int(problem.files.sizes[i]),
                "frequency": _dec(problem.files.frequencies[i]),
                "window": [int(problem.lower[i]), int(problem.upper[i])],
                "choices": choices,
            }
        )
    doc = {
        "format": FORMAT_TAG,
        "algorithm": algorithm,
        "constraint_source": constraint_source or {"kind": "unspecified"},
        "alphabet": [int(s) for s in z],
        "files": rows,
        "report": evaluate(joint).to_dict(),
    }
    if problem.original_sizes is not None:
        doc["original_sizes"] = [int(s) for s in problem.original_sizes]
    return doc


def save_scheme(
    path, joint: JointMatrix, algorithm: str, constraint_source: dict | None = None
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scheme_to_dict(joint, algorithm, constraint_source), fh, indent=1)
        fh.write("\n")


def scheme_from_dict(doc: dict) -> SchemeDocument:
    try:
        if doc.get("format") != FORMAT_TAG:
            raise ValidationError(f"unknown scheme format {doc.get('format')!r}")
        alphabet = OutputAlphabet(np.asarray(doc["alphabet"], dtype=np.int64))
        rows = doc["files"]
        sizes = [int(r["size"]) for r in rows]
        freqs = [float(r["frequency"]) for r in rows]
        windows = [tuple(r["window"]) for r in rows]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed scheme document: {exc}") from exc

    files = FileSet(np.asarray(sizes, dtype=np.int64), np.asarray(freqs))
    constraints = validate_constraints(windows, len(alphabet))
    original = doc.get("original_sizes")
    problem = PaddingProblem(
        files,
        alphabet,
        constraints,
        original_sizes=None if original is None else np.asarray(original, np.int64),
    )

    data: list[float] = []
    indices: list[int] = []
    indptr = [0]
    for i, row in enumerate(rows):
        total = 0.0
        for choice in row.get("choices", []):
            try:
                col = int(choice["column"])
                prob = float(choice["probability"])
                declared = int(choice["size"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ValidationError(
                    f"row {i + 1}: malformed choice: {exc}"
                ) from exc
            if not 1 <= col <= len(alphabet):
                raise ValidationError(f"row {i + 1}: column {col} out of range")
            if declared != int(alphabet.sizes[col - 1]):
                raise ValidationError(
                    f"row {i + 1}: size {declared} disagrees with alphabet entry "
                    f"{int(alphabet.sizes[col - 1])}"
                )
            if prob < 0.0:
                raise ValidationError(f"row {i + 1}: negative probability")
            data.append(prob)
            indices.append(col - 1)
            total += prob
        indptr.append(len(data))
        if abs(total - freqs[i]) > 1e-9:
            raise ValidationError(
                f"row {i + 1}: choices sum to {total!r}, expected {freqs[i]!r}"
            )

    matrix = sp.csr_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.int64), np.asarray(indptr)),
        shape=(problem.n, problem.m),
    )
    joint = JointMatrix(problem, matrix)
    joint.validate()
    if "report" in doc:
        try:
            report = LeakageReport(**doc["report"])
        except Exception as exc:
            raise ValidationError(f"scheme report is inconsistent: {exc}") from exc
    else:
        report = evaluate(joint)
    return SchemeDocument(
        algorithm=str(doc.get("algorithm", "unknown")),
        constraint_source=dict(doc.get("constraint_source", {})),
        joint=joint,
        report=report,
    )


def load_scheme(path) -> SchemeDocument:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON: {exc}") from exc
    return scheme_from_dict(doc)
