"""View-mimicking rotation, view grids and orthogonal-plane projection.

The rotation follows the printed homogeneous transforms verbatim: a point is
first passed through the x-axis transform (3x3 block plus a translation
column scaled by the point's own z), then through the y-axis transform whose
translation column is scaled by the intermediate point's z.  At zero angles
both stages are exact identities.  Note the printed 3x3 blocks are swapped
relative to the conventional axis naming; they are used as printed, not
"corrected".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from .errors import EmptyGridError
from .skeleton import SkeletonSequence


class Plane(Enum):
    FRONT = "front"  # drop z -> (x, y)
    TOP = "top"      # drop y -> (x, z)
    SIDE = "side"    # drop x -> (z, y)


@dataclass(frozen=True)
class ViewAngles:
    """Polar angle theta and azimuthal angle psi, in degrees."""

    theta: float
    psi: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.psi)):
            raise ValueError("angles must be finite")

    @property
    def is_identity(self) -> bool:
        return self.theta == 0.0 and self.psi == 0.0


@dataclass(frozen=True)
class ViewGrid:
    views: Tuple[ViewAngles, ...]

    def __post_init__(self):
        if not self.views:
            raise EmptyGridError("grid has no views")
        pairs = [(v.theta, v.psi) for v in self.views]
        if len(set(pairs)) != len(pairs):
            raise ValueError("duplicate (theta, psi) pairs in grid")

    def __len__(self):
        return len(self.views)

    def __iter__(self):
        return iter(self.views)


def _transform_matrices(angles: ViewAngles):
    """The two 4x4 homogeneous stages for one view; the z-scaled translation
    columns are returned as callables of the stage's input z."""
    th = math.radians(angles.theta)
    ps = math.radians(angles.psi)
    block_x = np.array(
        [
            [math.cos(th), 0.0, math.sin(th)],
            [0.0, 1.0, 0.0],
            [-math.sin(th), 0.0, math.cos(th)],
        ]
    )
    block_y = np.array(
        [
            [1.0, 0.0, 0.0],
            [0.0, math.cos(ps), -math.sin(ps)],
            [0.0, math.sin(ps), math.cos(ps)],
        ]
    )

    def trans_x(z):
        return np.array([-z * math.sin(th), 0.0, z * (1.0 - math.cos(th))])

    def trans_y(z):
        return np.array([0.0, z * math.sin(ps), z * (1.0 - math.cos(ps))])

    return block_x, trans_x, block_y, trans_y


def rotate_point(p, angles: ViewAngles) -> np.ndarray:
    """Apply the two-stage view rotation to a single 3D point."""
    block_x, trans_x, block_y, trans_y = _transform_matrices(angles)
    p = np.asarray(p, dtype=np.float64)
    q = block_x @ p + trans_x(p[2])
    return block_y @ q + trans_y(q[2])


def rotate_sequence(seq: SkeletonSequence, angles: ViewAngles) -> SkeletonSequence:
    """rotate_point applied to every joint of every frame; vectorized."""
    if angles.is_identity:
        return seq
    block_x, trans_x, block_y, trans_y = _transform_matrices(angles)
    pts = seq.data.reshape(-1, 3)
    q = pts @ block_x.T + np.outer(pts[:, 2], trans_x(1.0))
    r = q @ block_y.T + np.outer(q[:, 2], trans_y(1.0))
    return SkeletonSequence(
        r.reshape(seq.data.shape),
        joint_names=seq.joint_names,
        source_id=seq.source_id,
    )


def _inclusive_range(lo: float, hi: float, step: float):
    if step <= 0:
        raise ValueError("step must be positive")
    if hi < lo:
        raise EmptyGridError(f"range [{lo}, {hi}] is empty")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


def enumerate_views(
    theta_range=(0.0, 45.0),
    theta_step: float = 15.0,
    psi_range=(-45.0, 45.0),
    psi_step: float = 15.0,
) -> ViewGrid:
    """Inclusive Cartesian grid, theta outer / psi inner.  Defaults give the
    28-view augmentation grid (theta 0..45, psi -45..45, step 15)."""
    thetas = _inclusive_range(theta_range[0], theta_range[1], theta_step)
    psis = _inclusive_range(psi_range[0], psi_range[1], psi_step)
    views = tuple(ViewAngles(t, p) for t in thetas for p in psis)
    return ViewGrid(views)


def identity_grid() -> ViewGrid:
    return ViewGrid((ViewAngles(0.0, 0.0),))


def project(p, plane: Plane) -> np.ndarray:
    """Drop one coordinate: FRONT (x,y), TOP (x,z), SIDE (z,y)."""
    p = np.asarray(p, dtype=np.float64)
    if plane is Plane.FRONT:
        return p[..., [0, 1]]
    if plane is Plane.TOP:
        return p[..., [0, 2]]
    return p[..., [2, 1]]
