"""Per-joint trajectory segments and speeds from a skeleton sequence.

A sequence of n frames yields (n-1) x m segments; segment (i, k) runs from
joint k's position in frame i to its position in frame i+1.  Speeds are the
Euclidean norms of the displacements, computed on the 3D coordinates (after
any view rotation, before projection), so one speed field is shared by the
three projection planes of a view.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooShortError
from .skeleton import SkeletonSequence


@dataclass(frozen=True)
class TrajectorySet:
    start: np.ndarray         # (n-1, m, 3) segment start points
    end: np.ndarray           # (n-1, m, 3) segment end points
    displacement: np.ndarray  # (n-1, m, 3), end - start

    @property
    def segment_count(self) -> int:
        return self.start.shape[0]

    @property
    def joint_count(self) -> int:
        return self.start.shape[1]


@dataclass(frozen=True)
class SpeedField:
    v: np.ndarray  # (n-1, m) non-negative speeds
    v_max: float   # global maximum over the sequence


def compute_trajectories(seq: SkeletonSequence) -> TrajectorySet:
    if seq.frame_count < 2:
        raise TooShortError("need at least 2 frames for trajectories")
    start = seq.data[:-1]
    end = seq.data[1:]
    return TrajectorySet(start=start, end=end, displacement=end - start)


def compute_speeds(seq: SkeletonSequence) -> SpeedField:
    if seq.frame_count < 2:
        raise TooShortError("need at least 2 frames for speeds")
    disp = seq.data[1:] - seq.data[:-1]
    v = np.linalg.norm(disp, axis=2)
    return SpeedField(v=v, v_max=float(v.max()))
