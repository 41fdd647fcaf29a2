"""Segment colorization: hue by temporal position, colormap by body part,
saturation and brightness by joint speed.

Colormaps are 256-entry RGB tables on [0, 1].  The jet table follows the
MATLAB-style piecewise-linear definition

    r = clamp(1.5 - |4x - 3|), g = clamp(1.5 - |4x - 2|), b = clamp(1.5 - |4x - 1|)

for x in [0, 1], frozen here so renders are bit-exact across platforms.
Speed modulation goes through HSV: the base color's S and/or V channel is
overwritten with the linear speed map, then converted back to RGB.  For the
achromatic (grayscale) colormap the saturation override is a no-op.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .errors import OutOfRangeError
from .skeleton import JointPartition, Part, kinect_v1_partition, uniform_partition


class Level(Enum):
    """Encoding stages, from bare trajectories to the full encoding."""

    RAW = "raw"
    HUE = "hue"
    HUE_PARTS = "hue_parts"
    HUE_PARTS_SAT = "hue_parts_sat"
    HUE_PARTS_BRI = "hue_parts_bri"
    FULL = "full"


RAW_INK = (0.0, 0.0, 0.0)  # black on white background


def _jet_entries() -> np.ndarray:
    x = np.arange(256) / 255.0
    r = np.clip(1.5 - np.abs(4.0 * x - 3.0), 0.0, 1.0)
    g = np.clip(1.5 - np.abs(4.0 * x - 2.0), 0.0, 1.0)
    b = np.clip(1.5 - np.abs(4.0 * x - 1.0), 0.0, 1.0)
    return np.stack([r, g, b], axis=1)


def _grayscale_entries() -> np.ndarray:
    # light gray (0.8) down to black; light end stays visible on white
    g = np.linspace(0.8, 0.0, 256)
    return np.stack([g, g, g], axis=1)


@dataclass(frozen=True)
class ColorMapSpec:
    name: str
    entries: np.ndarray  # (256, 3) in [0, 1]
    achromatic: bool = False

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.float64)
        if e.shape != (256, 3):
            raise ValueError(f"colormap needs 256 RGB entries, got {e.shape}")
        if e.min() < 0.0 or e.max() > 1.0:
            raise ValueError("colormap channels must lie in [0, 1]")
        e = e.copy()
        e.flags.writeable = False
        object.__setattr__(self, "entries", e)

    def to_csv(self) -> str:
        lines = ["r,g,b"]
        for r, g, b in self.entries:
            lines.append(f"{r!r},{g!r},{b!r}")
        return "\n".join(lines) + "\n"


JET = ColorMapSpec("jet", _jet_entries())
JET_REVERSED = ColorMapSpec("jet_reversed", _jet_entries()[::-1])
GRAYSCALE = ColorMapSpec("grayscale", _grayscale_entries(), achromatic=True)

PART_COLORMAPS = {
    Part.LEFT: JET,
    Part.RIGHT: JET_REVERSED,
    Part.MIDDLE: GRAYSCALE,
}


@dataclass(frozen=True)
class EncodingParams:
    s_min: float = 0.0
    s_max: float = 1.0
    b_min: float = 0.0
    b_max: float = 1.0
    level: Level = Level.FULL
    partition: Optional[JointPartition] = None

    def __post_init__(self):
        if not (0.0 <= self.s_min <= self.s_max <= 1.0):
            raise ValueError("need 0 <= s_min <= s_max <= 1")
        if not (0.0 <= self.b_min <= self.b_max <= 1.0):
            raise ValueError("need 0 <= b_min <= b_max <= 1")

    def partition_for(self, m: int) -> JointPartition:
        """Explicit partition if set; Kinect V1 split for m=20; otherwise
        every joint is drawn with the primary colormap."""
        if self.partition is not None:
            if not self.partition.covers(m):
                raise ValueError(f"partition does not cover all {m} joints")
            return self.partition
        if m == 20:
            return kinect_v1_partition()
        return uniform_partition(m)


def sample_colormap(cmap: ColorMapSpec, l: float) -> Tuple[float, float, float]:
    """Color at normalized trajectory position l in [0, 1]."""
    if not (0.0 <= l <= 1.0):
        raise OutOfRangeError(f"colormap position {l} outside [0, 1]")
    idx = int(np.floor(l * 255.0 + 0.5))
    return tuple(cmap.entries[idx])


def hue_position(q: int, n: int) -> float:
    """Normalized temporal position of the q-th trajectory of an n-frame
    sequence: q / (n - 1), for q in 1..n-1."""
    if n < 2:
        raise OutOfRangeError(f"n={n} has no trajectories")
    if not (1 <= q <= n - 1):
        raise OutOfRangeError(f"q={q} outside 1..{n - 1}")
    return q / (n - 1)


def _speed_ratio(v: float, v_max: float) -> float:
    if v < 0 or v > v_max + 1e-12:
        raise OutOfRangeError(f"speed {v} outside [0, {v_max}]")
    if v_max <= 0.0:
        return 0.0  # fully static sequence: minimum saturation/brightness
    return min(v / v_max, 1.0)


def saturation(v: float, v_max: float, params: EncodingParams) -> float:
    return _speed_ratio(v, v_max) * (params.s_max - params.s_min) + params.s_min


def brightness(v: float, v_max: float, params: EncodingParams) -> float:
    return _speed_ratio(v, v_max) * (params.b_max - params.b_min) + params.b_min


def colormap_for_joint(k: int, m: int, params: EncodingParams) -> ColorMapSpec:
    part = params.partition_for(m).part(k)
    return PART_COLORMAPS[part]


def colorize_segment(
    q: int,
    k: int,
    v: float,
    v_max: float,
    n: int,
    m: int,
    params: EncodingParams,
) -> Tuple[float, float, float]:
    """Final RGB for segment (q, k) under the configured encoding level."""
    level = params.level
    if level is Level.RAW:
        return RAW_INK
    l = hue_position(q, n)
    if level is Level.HUE:
        cmap = JET
    else:
        cmap = colormap_for_joint(k, m, params)
    rgb = sample_colormap(cmap, l)
    if level in (Level.HUE, Level.HUE_PARTS):
        return rgb
    h, s, val = colorsys.rgb_to_hsv(*rgb)
    if level in (Level.HUE_PARTS_SAT, Level.FULL) and not cmap.achromatic:
        s = saturation(v, v_max, params)
    if level in (Level.HUE_PARTS_BRI, Level.FULL):
        val = brightness(v, v_max, params)
    return colorsys.hsv_to_rgb(h, s, val)
