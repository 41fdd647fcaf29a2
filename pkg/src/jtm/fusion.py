"""Late fusion of per-classifier score vectors and prediction.

The wire format is a CSV with header ``sample_id,<label_1>,...,<label_C>``
and one row of non-negative decimal scores per sample.  Fused outputs are
not re-normalized; prediction takes the argmax with ties broken by lowest
class index.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import IdMismatchError, ShapeMismatchError


@dataclass(frozen=True)
class ScoreMatrix:
    sample_ids: Tuple[str, ...]
    class_labels: Tuple[str, ...]
    scores: np.ndarray  # (samples, classes), non-negative

    def __post_init__(self):
        arr = np.asarray(self.scores, dtype=np.float64)
        if arr.ndim != 2:
            raise ShapeMismatchError(f"scores must be 2D, got {arr.ndim}D")
        if arr.shape != (len(self.sample_ids), len(self.class_labels)):
            raise ShapeMismatchError(
                f"scores shape {arr.shape} does not match "
                f"{len(self.sample_ids)} samples x {len(self.class_labels)} classes"
            )
        if len(set(self.sample_ids)) != len(self.sample_ids):
            raise ShapeMismatchError("duplicate sample_ids")
        if not np.isfinite(arr).all():
            raise ShapeMismatchError("scores must be finite")
        if (arr < 0).any():
            raise ShapeMismatchError("scores must be non-negative")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))
        object.__setattr__(self, "class_labels", tuple(self.class_labels))
        object.__setattr__(self, "scores", arr)


def _check_aligned(matrices: Sequence[ScoreMatrix]) -> None:
    if len(matrices) < 2:
        raise ShapeMismatchError("fusion needs at least 2 score matrices")
    first = matrices[0]
    for m in matrices[1:]:
        if m.class_labels != first.class_labels:
            raise IdMismatchError("class labels differ between score matrices")
        if m.sample_ids != first.sample_ids:
            raise IdMismatchError("sample ids differ between score matrices")


def multiply_fuse(matrices: Sequence[ScoreMatrix]) -> ScoreMatrix:
    """Elementwise product of the score matrices."""
    _check_aligned(matrices)
    prod = matrices[0].scores.copy()
    for m in matrices[1:]:
        prod = prod * m.scores
    return ScoreMatrix(matrices[0].sample_ids, matrices[0].class_labels, prod)


def average_fuse(matrices: Sequence[ScoreMatrix]) -> ScoreMatrix:
    _check_aligned(matrices)
    mean = np.mean([m.scores for m in matrices], axis=0)
    return ScoreMatrix(matrices[0].sample_ids, matrices[0].class_labels, mean)


def max_fuse(matrices: Sequence[ScoreMatrix]) -> ScoreMatrix:
    _check_aligned(matrices)
    mx = np.max([m.scores for m in matrices], axis=0)
    return ScoreMatrix(matrices[0].sample_ids, matrices[0].class_labels, mx)


FUSE_METHODS = {
    "multiply": multiply_fuse,
    "average": average_fuse,
    "max": max_fuse,
}


def predict(m: ScoreMatrix) -> List[Tuple[str, str]]:
    """(sample_id, label) per row; argmax, ties go to the lowest class index."""
    if len(m.sample_ids) == 0:
        raise ShapeMismatchError("empty score matrix")
    idx = np.argmax(m.scores, axis=1)  # np.argmax returns the first maximum
    return [
        (sid, m.class_labels[int(i)]) for sid, i in zip(m.sample_ids, idx)
    ]


def accuracy(m: ScoreMatrix, truth: dict) -> float:
    preds = predict(m)
    correct = sum(1 for sid, label in preds if truth[sid] == label)
    return correct / len(preds)


def to_csv(m: ScoreMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sample_id", *m.class_labels])
    for sid, row in zip(m.sample_ids, m.scores):
        w.writerow([sid, *[repr(float(x)) for x in row]])
    return buf.getvalue()


def from_csv(text: str) -> ScoreMatrix:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows:
        raise ShapeMismatchError("empty score CSV")
    header = rows[0]
    if not header or header[0] != "sample_id":
        raise ShapeMismatchError("score CSV must start with a 'sample_id' header")
    labels = tuple(header[1:])
    ids = []
    scores = []
    for r in rows[1:]:
        if len(r) != len(header):
            raise ShapeMismatchError(f"row for {r[0] if r else '?'} has wrong width")
        ids.append(r[0])
        try:
            scores.append([float(x) for x in r[1:]])
        except ValueError as e:
            raise ShapeMismatchError(f"non-numeric score in row {r[0]}: {e}") from e
    arr = (
        np.asarray(scores, dtype=np.float64)
        if scores
        else np.zeros((0, len(labels)))
    )
    return ScoreMatrix(tuple(ids), labels, arr)


def load_csv(path) -> ScoreMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return from_csv(fh.read())


def save_csv(m: ScoreMatrix, path) -> None:
    import os

    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(to_csv(m))
    os.replace(tmp, path)
