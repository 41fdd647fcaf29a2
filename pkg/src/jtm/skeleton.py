"""Skeleton sequence data model, file formats and validation.

A sequence is n frames of m joints in 3D camera coordinates
(x right, y up, z depth, meters).  Two on-disk formats are supported:

* canonical JSON-lines: one header object (``m``, optional ``joint_names``
  and ``source_id``) followed by one object per frame with a ``joints``
  list of [x, y, z] triples.  Floats are written with ``repr`` precision,
  so parse(write(s)) is bit-exact.
* PLAIN_XYZ: one line per frame, 3*m whitespace-separated numbers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from .errors import NonFiniteError, ShapeError, SyntaxInputError


class SequenceFormat(Enum):
    CANONICAL_JSON = "jsonl"
    PLAIN_XYZ = "xyz"


class Part(Enum):
    LEFT = "left"
    RIGHT = "right"
    MIDDLE = "middle"


# Kinect V1 20-joint layout used throughout (index -> name).
KINECT_V1_JOINTS = [
    "hip_center",
    "spine",
    "shoulder_center",
    "head",
    "shoulder_left",
    "elbow_left",
    "wrist_left",
    "hand_left",
    "shoulder_right",
    "elbow_right",
    "wrist_right",
    "hand_right",
    "hip_left",
    "knee_left",
    "ankle_left",
    "foot_left",
    "hip_right",
    "knee_right",
    "ankle_right",
    "foot_right",
]


@dataclass(frozen=True)
class JointPartition:
    """Total map joint index -> body part (LEFT / RIGHT / MIDDLE)."""

    part_of: dict

    def __post_init__(self):
        for j, p in self.part_of.items():
            if not isinstance(p, Part):
                raise ValueError(f"joint {j} mapped to non-Part {p!r}")

    def part(self, joint_index: int) -> Part:
        return self.part_of[joint_index]

    def covers(self, m: int) -> bool:
        return all(j in self.part_of for j in range(m))


def kinect_v1_partition() -> JointPartition:
    """Default three-part split of the 20-joint Kinect V1 skeleton.

    Left/right arms and legs form the LEFT/RIGHT parts; head, neck
    (shoulder center), torso (spine) and hip center form MIDDLE.
    """
    left = {4, 5, 6, 7, 12, 13, 14, 15}
    right = {8, 9, 10, 11, 16, 17, 18, 19}
    part_of = {}
    for j in range(20):
        if j in left:
            part_of[j] = Part.LEFT
        elif j in right:
            part_of[j] = Part.RIGHT
        else:
            part_of[j] = Part.MIDDLE
    return JointPartition(part_of)


def uniform_partition(m: int, part: Part = Part.LEFT) -> JointPartition:
    """Fallback partition for non-Kinect joint counts: every joint in one part."""
    return JointPartition({j: part for j in range(m)})


@dataclass(frozen=True)
class SkeletonSequence:
    """n frames x m joints of 3D coordinates, immutable after construction."""

    data: np.ndarray  # (n, m, 3) float64
    joint_names: Optional[tuple] = None
    source_id: str = ""

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ShapeError(f"expected (n, m, 3) array, got {arr.shape}")
        if arr.shape[0] < 1:
            raise ShapeError("need at least one frame")
        if self.joint_names is not None and len(self.joint_names) != arr.shape[1]:
            raise ShapeError(
                f"{len(self.joint_names)} joint names for m={arr.shape[1]}"
            )
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def frame_count(self) -> int:
        return self.data.shape[0]

    @property
    def joint_count(self) -> int:
        return self.data.shape[1]

    def frame(self, i: int) -> np.ndarray:
        return self.data[i]

    def translated(self, offset) -> "SkeletonSequence":
        return SkeletonSequence(
            self.data + np.asarray(offset, dtype=np.float64),
            joint_names=self.joint_names,
            source_id=self.source_id,
        )

    def reversed(self) -> "SkeletonSequence":
        return SkeletonSequence(
            self.data[::-1], joint_names=self.joint_names, source_id=self.source_id
        )

    def __eq__(self, other):
        if not isinstance(other, SkeletonSequence):
            return NotImplemented
        return (
            self.data.shape == other.data.shape
            and np.array_equal(self.data, other.data)
            and self.joint_names == other.joint_names
            and self.source_id == other.source_id
        )


@dataclass(frozen=True)
class Violation:
    kind: str  # SHAPE or NONFINITE
    frame: int
    joint: Optional[int] = None


def validate(seq: SkeletonSequence) -> list:
    """Return all invariant violations; empty list iff the sequence is valid."""
    out = []
    finite = np.isfinite(seq.data)
    if not finite.all():
        bad = np.argwhere(~finite.all(axis=2))
        seen = set()
        for f, j in bad:
            if (f, j) not in seen:
                seen.add((f, j))
                out.append(Violation("NONFINITE", frame=int(f), joint=int(j)))
    return out


def validate_raw_frames(frames: Iterable, m: int) -> list:
    """Violation list for not-yet-constructed frame data (nested lists), where
    ragged frames can still occur; construction itself rejects them."""
    out = []
    for i, fr in enumerate(frames):
        if len(fr) != m or any(len(p) != 3 for p in fr):
            out.append(Violation("SHAPE", frame=i))
            continue
        for j, p in enumerate(fr):
            if not all(math.isfinite(c) for c in p):
                out.append(Violation("NONFINITE", frame=i, joint=j))
    return out


def _validate_raw_frames(frames: list, m: int) -> None:
    for i, fr in enumerate(frames):
        if len(fr) != m:
            raise ShapeError(f"frame {i} has {len(fr)} joints, expected {m}")
        for j, p in enumerate(fr):
            if len(p) != 3:
                raise ShapeError(f"frame {i} joint {j} is not a 3-vector")
            for c in p:
                if not math.isfinite(c):
                    raise NonFiniteError(f"frame {i} joint {j}")


def parse_sequence(
    text: str,
    fmt: SequenceFormat = SequenceFormat.CANONICAL_JSON,
    m: Optional[int] = None,
) -> SkeletonSequence:
    """Parse a sequence document; ``m`` is required only for PLAIN_XYZ when it
    cannot be inferred from the first line."""
    if fmt is SequenceFormat.CANONICAL_JSON:
        return _parse_jsonl(text)
    return _parse_xyz(text, m)


def _parse_jsonl(text: str) -> SkeletonSequence:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SyntaxInputError("empty document")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise SyntaxInputError(f"bad header: {e}") from e
    if not isinstance(header, dict) or "m" not in header:
        raise SyntaxInputError("header must be an object with an 'm' field")
    m = header["m"]
    if not isinstance(m, int) or m < 0:
        raise SyntaxInputError("'m' must be a non-negative integer")
    names = header.get("joint_names")
    if names is not None:
        if not isinstance(names, list) or len(names) != m:
            raise SyntaxInputError("joint_names length must equal m")
        names = tuple(names)
    frames = []
    for ln in lines[1:]:
        try:
            rec = json.loads(ln)
        except json.JSONDecodeError as e:
            raise SyntaxInputError(f"bad frame record: {e}") from e
        if not isinstance(rec, dict) or "joints" not in rec:
            raise SyntaxInputError("frame record must have a 'joints' field")
        frames.append(rec["joints"])
    if not frames:
        raise SyntaxInputError("no frame records")
    _validate_raw_frames(frames, m)
    data = np.asarray(frames, dtype=np.float64).reshape(len(frames), m, 3)
    return SkeletonSequence(
        data, joint_names=names, source_id=str(header.get("source_id", ""))
    )


def _parse_xyz(text: str, m: Optional[int]) -> SkeletonSequence:
    rows = []
    for i, ln in enumerate(text.splitlines()):
        if not ln.strip():
            continue
        try:
            vals = [float(tok) for tok in ln.split()]
        except ValueError as e:
            raise SyntaxInputError(f"line {i}: {e}") from e
        rows.append(vals)
    if not rows:
        raise SyntaxInputError("empty document")
    if m is None:
        if len(rows[0]) % 3 != 0:
            raise SyntaxInputError("first line length is not a multiple of 3")
        m = len(rows[0]) // 3
    frames = []
    for i, vals in enumerate(rows):
        if len(vals) != 3 * m:
            raise ShapeError(f"frame {i} has {len(vals) // 3} joints, expected {m}")
        frames.append([vals[3 * j : 3 * j + 3] for j in range(m)])
    _validate_raw_frames(frames, m)
    data = np.asarray(frames, dtype=np.float64).reshape(len(frames), m, 3)
    return SkeletonSequence(data)


def write_sequence(
    seq: SkeletonSequence, fmt: SequenceFormat = SequenceFormat.CANONICAL_JSON
) -> str:
    """Serialize; output re-parses to an identical sequence (repr floats)."""
    if fmt is SequenceFormat.CANONICAL_JSON:
        header = {"m": seq.joint_count}
        if seq.joint_names is not None:
            header["joint_names"] = list(seq.joint_names)
        if seq.source_id:
            header["source_id"] = seq.source_id
        lines = [json.dumps(header, sort_keys=True, separators=(",", ":"))]
        for fr in seq.data:
            joints = [[float(c) for c in p] for p in fr]
            lines.append(json.dumps({"joints": joints}, separators=(",", ":")))
        return "\n".join(lines) + "\n"
    lines = []
    for fr in seq.data:
        lines.append(" ".join(repr(float(c)) for p in fr for c in p))
    return "\n".join(lines) + "\n"


def repair_missing(seq: SkeletonSequence) -> SkeletonSequence:
    """Optional repair pass: per-joint linear interpolation across time over
    NaN coordinates.  Leading/trailing gaps take the nearest valid value.
    Off by default everywhere; callers opt in explicitly."""
    data = seq.data.copy()
    n = seq.frame_count
    t = np.arange(n)
    for j in range(seq.joint_count):
        for c in range(3):
            col = data[:, j, c]
            bad = ~np.isfinite(col)
            if not bad.any():
                continue
            if bad.all():
                raise NonFiniteError(f"joint {j} channel {c} has no valid samples")
            col[bad] = np.interp(t[bad], t[~bad], col[~bad])
    return SkeletonSequence(data, joint_names=seq.joint_names, source_id=seq.source_id)
