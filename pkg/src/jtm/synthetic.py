"""Deterministic synthetic action generator for desk-scale evaluation.

Each generator animates a few joints of a 20-joint standing pose along a
parametric path; everything is seeded through numpy's SeedSequence spawning,
so a corpus is reproducible from a single integer seed.  The class roster
deliberately contains a direction pair (clockwise / counter-clockwise
circle, where the counter-clockwise one is the time reversal of the
clockwise path, so their footprints are identical), a magnitude pair (same
sweep path, constant vs bursty speed profile), and classes separable mostly
in the top/side planes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .skeleton import KINECT_V1_JOINTS, SkeletonSequence

J = {name: i for i, name in enumerate(KINECT_V1_JOINTS)}


def base_pose() -> np.ndarray:
    """Neutral standing pose in camera coordinates, ~2.5 m from the sensor."""
    p = np.zeros((20, 3))
    z = 2.5

    def setj(name, x, y, zz=z):
        p[J[name]] = (x, y, zz)

    setj("hip_center", 0.00, 0.90)
    setj("spine", 0.00, 1.08)
    setj("shoulder_center", 0.00, 1.35)
    setj("head", 0.00, 1.58)
    setj("shoulder_left", -0.20, 1.30)
    setj("elbow_left", -0.26, 1.05)
    setj("wrist_left", -0.29, 0.85)
    setj("hand_left", -0.31, 0.77)
    setj("shoulder_right", 0.20, 1.30)
    setj("elbow_right", 0.26, 1.05)
    setj("wrist_right", 0.29, 0.85)
    setj("hand_right", 0.31, 0.77)
    setj("hip_left", -0.12, 0.85)
    setj("knee_left", -0.14, 0.48)
    setj("ankle_left", -0.15, 0.10)
    setj("foot_left", -0.15, 0.03, z + 0.06)
    setj("hip_right", 0.12, 0.85)
    setj("knee_right", 0.14, 0.48)
    setj("ankle_right", 0.15, 0.10)
    setj("foot_right", 0.15, 0.03, z + 0.06)
    return p


def _arm_chain_right():
    return [J["hand_right"], J["wrist_right"], J["elbow_right"]]


def _animate(n: int, moves: Dict[int, np.ndarray]) -> np.ndarray:
    """Frames from the base pose plus per-joint position overrides."""
    data = np.tile(base_pose(), (n, 1, 1))
    for joint, path in moves.items():
        data[:, joint, :] = path
    return data


def _circle_path(n: int) -> np.ndarray:
    """Clockwise circle of the right hand in the front plane."""
    t = np.linspace(0.0, 1.0, n)
    phi = np.pi / 2 - 2.0 * np.pi * t
    cx, cy, r = 0.38, 1.15, 0.22
    return np.stack(
        [cx + r * np.cos(phi), cy + r * np.sin(phi), np.full(n, 2.45)], axis=1
    )


def _attach_arm(n: int, hand_path: np.ndarray) -> Dict[int, np.ndarray]:
    """Hand leads; wrist and elbow trail toward the shoulder."""
    hand, wrist, elbow = _arm_chain_right()
    shoulder = base_pose()[J["shoulder_right"]]
    return {
        hand: hand_path,
        wrist: shoulder + 0.8 * (hand_path - shoulder),
        elbow: shoulder + 0.45 * (hand_path - shoulder),
    }


def gen_circle_cw(n: int) -> np.ndarray:
    return _animate(n, _attach_arm(n, _circle_path(n)))


def gen_circle_ccw(n: int) -> np.ndarray:
    # time reversal of the clockwise circle: same point set, opposite order
    return gen_circle_cw(n)[::-1]


def _sweep_path(n: int, profile: np.ndarray) -> np.ndarray:
    """Right hand sweeps left-to-right at chest height; ``profile`` maps
    frame index to path position in [0, 1]."""
    x = -0.35 + 0.80 * profile
    y = np.full(n, 1.10)
    z = np.full(n, 2.45)
    return np.stack([x, y, z], axis=1)


def gen_sweep_const(n: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n)
    return _animate(n, _attach_arm(n, _sweep_path(n, t)))


def gen_sweep_burst(n: int) -> np.ndarray:
    # same geometric path, bursty speed profile (slow-fast-slow)
    t = np.linspace(0.0, 1.0, n)
    profile = 0.5 - 0.5 * np.cos(np.pi * t) ** 3
    profile = (profile - profile[0]) / (profile[-1] - profile[0])
    return _animate(n, _attach_arm(n, _sweep_path(n, profile)))


def gen_punch_depth(n: int) -> np.ndarray:
    """Right hand pushes forward along z: visible mainly in top/side planes."""
    t = np.linspace(0.0, 1.0, n)
    reach = np.sin(np.pi * t)
    hand = np.stack(
        [
            np.full(n, 0.28),
            np.full(n, 1.20),
            2.45 - 0.55 * reach,
        ],
        axis=1,
    )
    return _animate(n, _attach_arm(n, hand))


def gen_kick(n: int) -> np.ndarray:
    """Right leg kicks forward and up."""
    t = np.linspace(0.0, 1.0, n)
    swing = np.sin(np.pi * t)
    ankle = np.stack(
        [
            np.full(n, 0.16),
            0.10 + 0.45 * swing,
            2.5 - 0.50 * swing,
        ],
        axis=1,
    )
    hip = base_pose()[J["hip_right"]]
    knee = hip + 0.5 * (ankle - hip) + np.array([0.0, 0.05, -0.05]) * swing[:, None]
    foot = ankle + np.array([0.0, -0.04, 0.10])
    return _animate(
        n,
        {
            J["ankle_right"]: ankle,
            J["knee_right"]: knee,
            J["foot_right"]: foot,
        },
    )


def gen_raise_both(n: int) -> np.ndarray:
    """Both hands raise overhead: left and right parts move together."""
    t = np.linspace(0.0, 1.0, n)
    lift = 0.85 * np.sin(np.pi / 2 * t)
    pose = base_pose()
    moves = {}
    for side, sign in (("left", -1.0), ("right", 1.0)):
        shoulder = pose[J[f"shoulder_{side}"]]
        hand = np.stack(
            [
                sign * (0.31 - 0.12 * t),
                0.77 + lift,
                np.full(n, 2.5),
            ],
            axis=1,
        )
        moves[J[f"hand_{side}"]] = hand
        moves[J[f"wrist_{side}"]] = shoulder + 0.8 * (hand - shoulder)
        moves[J[f"elbow_{side}"]] = shoulder + 0.45 * (hand - shoulder)
    return _animate(n, moves)


GENERATORS: Dict[str, Callable[[int], np.ndarray]] = {
    "circle-cw": gen_circle_cw,
    "circle-ccw": gen_circle_ccw,
    "sweep-const": gen_sweep_const,
    "sweep-burst": gen_sweep_burst,
    "punch-depth": gen_punch_depth,
    "kick": gen_kick,
    "raise-both": gen_raise_both,
}


@dataclass(frozen=True)
class SyntheticClassSpec:
    class_label: str
    generator: str
    jitter: float = 0.0  # noise std in meters, per joint per frame
    frame_range: Tuple[int, int] = (24, 32)

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}")
        if self.jitter < 0:
            raise ValueError("jitter must be >= 0")
        lo, hi = self.frame_range
        if lo < 2 or hi < lo:
            raise ValueError(f"bad frame range {self.frame_range}")


def make_sample(
    spec: SyntheticClassSpec, rng: np.random.Generator, source_id: str = ""
) -> SkeletonSequence:
    lo, hi = spec.frame_range
    n = int(rng.integers(lo, hi + 1))
    data = GENERATORS[spec.generator](n)
    if spec.jitter > 0:
        data = data + rng.normal(0.0, spec.jitter, size=data.shape)
    return SkeletonSequence(
        data, joint_names=tuple(KINECT_V1_JOINTS), source_id=source_id
    )


def generate_synthetic(
    specs: List[SyntheticClassSpec], per_class: int, seed: int
) -> List[Tuple[str, SkeletonSequence]]:
    """Labeled corpus, deterministic for a fixed seed.  Samples are seeded
    per (class, index) so the corpus is stable under reordering."""
    if per_class < 1:
        raise ValueError("per_class must be >= 1")
    out = []
    for ci, spec in enumerate(specs):
        for s in range(per_class):
            rng = np.random.default_rng(np.random.SeedSequence([seed, ci, s]))
            sid = f"{spec.class_label}_{s:03d}"
            out.append((spec.class_label, make_sample(spec, rng, source_id=sid)))
    return out


def bundled_specs(jitter: float = 0.008) -> List[SyntheticClassSpec]:
    """The 6-class roster used by the bundled evaluation corpus."""
    return [
        SyntheticClassSpec("circle-cw", "circle-cw", jitter),
        SyntheticClassSpec("circle-ccw", "circle-ccw", jitter),
        SyntheticClassSpec("sweep-const", "sweep-const", jitter),
        SyntheticClassSpec("sweep-burst", "sweep-burst", jitter),
        SyntheticClassSpec("punch-depth", "punch-depth", jitter),
        SyntheticClassSpec("kick", "kick", jitter),
    ]


def bundled_corpus(
    per_class: int = 30, seed: int = 20230917
) -> List[Tuple[str, SkeletonSequence]]:
    return generate_synthetic(bundled_specs(), per_class, seed)


def direction_magnitude_specs(jitter: float = 0.008) -> List[SyntheticClassSpec]:
    """Direction pair plus magnitude pair, for the encoding-level trend runs."""
    return [
        SyntheticClassSpec("circle-cw", "circle-cw", jitter),
        SyntheticClassSpec("circle-ccw", "circle-ccw", jitter),
        SyntheticClassSpec("sweep-const", "sweep-const", jitter),
        SyntheticClassSpec("sweep-burst", "sweep-burst", jitter),
    ]


def bundled_sample(n: int = 50, seed: int = 7) -> SkeletonSequence:
    """The 20-joint, 50-frame reference sample used by determinism checks."""
    spec = SyntheticClassSpec("circle-cw", "circle-cw", 0.01, (n, n))
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    return make_sample(spec, rng, source_id="bundled_sample")
