"""Rasterization of colored trajectory segments into JTM images.

World-to-pixel mapping is a per-sequence, per-plane aspect-preserving fit of
the projected bounding box into the canvas with a fractional margin, y
flipped so larger world-y is higher in the image.  Lines are 1-pixel
Bresenham (integer arithmetic, minor axis rounded half-up toward +inf) with
painter's overwrite in chronological order, which keeps renders bit-exact
across platforms and thread counts.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np
from PIL import Image

from .encoding import EncodingParams, Level, colorize_segment
from .errors import TooShortError
from .geometry import Plane, ViewAngles, ViewGrid, project, rotate_sequence
from .skeleton import SkeletonSequence
from .trajectory import compute_speeds, compute_trajectories

BACKGROUND = (1.0, 1.0, 1.0)
MIN_EXTENT = 1e-6  # world units; pads degenerate bounding-box axes


@dataclass(frozen=True)
class RenderOptions:
    width: int = 256
    height: int = 256
    thickness: int = 1
    margin: float = 0.05

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("canvas dimensions must be positive")
        if self.thickness < 1:
            raise ValueError("thickness must be >= 1")
        if not (0.0 <= self.margin < 0.5):
            raise ValueError("margin fraction must lie in [0, 0.5)")


@dataclass
class JtmCanvas:
    width: int
    height: int
    plane: Plane
    pixels: np.ndarray  # (height, width, 3) float in [0, 1]

    @classmethod
    def blank(cls, width: int, height: int, plane: Plane) -> "JtmCanvas":
        px = np.ones((height, width, 3), dtype=np.float64)
        px[:, :] = BACKGROUND
        return cls(width=width, height=height, plane=plane, pixels=px)

    def to_8bit(self) -> np.ndarray:
        return np.floor(self.pixels * 255.0 + 0.5).astype(np.uint8)

    def to_png_bytes(self) -> bytes:
        import io

        buf = io.BytesIO()
        Image.fromarray(self.to_8bit(), mode="RGB").save(buf, format="PNG")
        return buf.getvalue()

    def save_png(self, path) -> None:
        # atomic write: temp file in the same directory, then rename
        path = os.fspath(path)
        tmp = path + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(self.to_png_bytes())
        os.replace(tmp, path)


@dataclass(frozen=True)
class NormalizationBox:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    margin: float = 0.05

    @classmethod
    def of_points(cls, pts: np.ndarray, margin: float = 0.05) -> "NormalizationBox":
        pts = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
        return cls(
            x_min=float(pts[:, 0].min()),
            x_max=float(pts[:, 0].max()),
            y_min=float(pts[:, 1].min()),
            y_max=float(pts[:, 1].max()),
            margin=margin,
        )


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def world_to_pixel(
    p2, box: NormalizationBox, width: int, height: int
) -> Tuple[int, int]:
    """Map a projected 2D point into pixel coordinates (column, row)."""
    ex = max(box.x_max - box.x_min, MIN_EXTENT)
    ey = max(box.y_max - box.y_min, MIN_EXTENT)
    avail_w = width * (1.0 - 2.0 * box.margin)
    avail_h = height * (1.0 - 2.0 * box.margin)
    scale = min(avail_w / ex, avail_h / ey)
    cx = (width - 1) / 2.0
    cy = (height - 1) / 2.0
    bx = (box.x_min + box.x_max) / 2.0
    by = (box.y_min + box.y_max) / 2.0
    px = _round_half_up(cx + (p2[0] - bx) * scale)
    py = _round_half_up(cy - (p2[1] - by) * scale)
    return (min(max(px, 0), width - 1), min(max(py, 0), height - 1))


def _world_to_pixel_array(
    pts: np.ndarray, box: NormalizationBox, width: int, height: int
) -> np.ndarray:
    """Vectorized world_to_pixel over an (..., 2) array; same arithmetic,
    elementwise, so results agree exactly with the scalar form."""
    ex = max(box.x_max - box.x_min, MIN_EXTENT)
    ey = max(box.y_max - box.y_min, MIN_EXTENT)
    scale = min(width * (1.0 - 2.0 * box.margin) / ex,
                height * (1.0 - 2.0 * box.margin) / ey)
    cx = (width - 1) / 2.0
    cy = (height - 1) / 2.0
    bx = (box.x_min + box.x_max) / 2.0
    by = (box.y_min + box.y_max) / 2.0
    px = np.floor(cx + (pts[..., 0] - bx) * scale + 0.5).astype(np.int64)
    py = np.floor(cy - (pts[..., 1] - by) * scale + 0.5).astype(np.int64)
    out = np.stack(
        [np.clip(px, 0, width - 1), np.clip(py, 0, height - 1)], axis=-1
    )
    return out


def line_pixels(x0: int, y0: int, x1: int, y1: int) -> np.ndarray:
    """Pixel set of the Bresenham line, as an (n, 2) array of (x, y).

    Integer-only: steps along the major axis, minor coordinate is the exact
    line value rounded half-up (ties toward +inf).
    """
    dx = x1 - x0
    dy = y1 - y0
    steps = max(abs(dx), abs(dy))
    if steps == 0:
        return np.array([[x0, y0]], dtype=np.int64)
    i = np.arange(steps + 1, dtype=np.int64)
    # round_half_up(a / steps) == (2a + steps) // (2 steps) for steps > 0
    xs = (2 * (x0 * steps + dx * i) + steps) // (2 * steps)
    ys = (2 * (y0 * steps + dy * i) + steps) // (2 * steps)
    return np.stack([xs, ys], axis=1)


def draw_segment(
    canvas: JtmCanvas, a: Tuple[int, int], b: Tuple[int, int], rgb, thickness: int = 1
) -> None:
    """Paint the Bresenham line from a to b (overwrite semantics)."""
    pts = line_pixels(a[0], a[1], b[0], b[1])
    xs, ys = pts[:, 0], pts[:, 1]
    if thickness <= 1:
        canvas.pixels[ys, xs] = rgb
        return
    r = thickness // 2
    for ox in range(-r, thickness - r):
        for oy in range(-r, thickness - r):
            cx = np.clip(xs + ox, 0, canvas.width - 1)
            cy = np.clip(ys + oy, 0, canvas.height - 1)
            canvas.pixels[cy, cx] = rgb


@dataclass(frozen=True)
class RenderPlan:
    """Level-independent geometry for one (sequence, view, plane): pixel
    endpoints of every segment plus the speed field.  Lets experiment
    runners recolor the same geometry at several encoding levels."""

    plane: Plane
    n: int
    m: int
    start_px: np.ndarray  # (n-1, m, 2) int
    end_px: np.ndarray    # (n-1, m, 2) int
    v: np.ndarray         # (n-1, m)
    v_max: float
    options: RenderOptions


def prepare_render(
    seq: SkeletonSequence,
    plane: Plane,
    angles: ViewAngles,
    options: RenderOptions = RenderOptions(),
) -> RenderPlan:
    if seq.frame_count < 2:
        raise TooShortError("need at least 2 frames to render a JTM")
    rot = rotate_sequence(seq, angles)
    speeds = compute_speeds(rot)
    traj = compute_trajectories(rot)
    proj_all = project(rot.data, plane)  # (n, m, 2)
    box = NormalizationBox.of_points(proj_all, margin=options.margin)
    n1, m = traj.segment_count, traj.joint_count
    px_all = _world_to_pixel_array(proj_all, box, options.width, options.height)
    start_px = px_all[:-1]
    end_px = px_all[1:]
    return RenderPlan(
        plane=plane,
        n=seq.frame_count,
        m=m,
        start_px=start_px,
        end_px=end_px,
        v=speeds.v,
        v_max=speeds.v_max,
        options=options,
    )


def paint(plan: RenderPlan, params: EncodingParams) -> JtmCanvas:
    """Draw a prepared plan in chronological order (frames outer, joints
    inner); later segments overwrite earlier ones."""
    opts = plan.options
    canvas = JtmCanvas.blank(opts.width, opts.height, plan.plane)
    n1 = plan.start_px.shape[0]
    for i in range(n1):
        q = i + 1
        for k in range(plan.m):
            rgb = colorize_segment(
                q, k, float(plan.v[i, k]), plan.v_max, plan.n, plan.m, params
            )
            draw_segment(
                canvas,
                tuple(plan.start_px[i, k]),
                tuple(plan.end_px[i, k]),
                rgb,
                thickness=opts.thickness,
            )
    return canvas


def render_jtm(
    seq: SkeletonSequence,
    plane: Plane,
    angles: ViewAngles = ViewAngles(0.0, 0.0),
    params: EncodingParams = EncodingParams(),
    options: RenderOptions = RenderOptions(),
) -> JtmCanvas:
    return paint(prepare_render(seq, plane, angles, options), params)


def _thread_count() -> int:
    raw = os.environ.get("JTM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def render_all(
    seq: SkeletonSequence,
    grid: ViewGrid,
    params: EncodingParams = EncodingParams(),
    options: RenderOptions = RenderOptions(),
    threads: Optional[int] = None,
) -> Dict[ViewAngles, Dict[Plane, JtmCanvas]]:
    """All three planes for every view of the grid.  Parallel across
    (view, plane) pairs; each canvas is produced by a pure render, so the
    result is independent of the thread count."""
    jobs = [(view, plane) for view in grid for plane in Plane]
    workers = threads if threads is not None else _thread_count()

    def run(job):
        view, plane = job
        return render_jtm(seq, plane, view, params, options)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            canvases = list(pool.map(run, jobs))
    else:
        canvases = [run(j) for j in jobs]

    out: Dict[ViewAngles, Dict[Plane, JtmCanvas]] = {}
    for (view, plane), canvas in zip(jobs, canvases):
        out.setdefault(view, {})[plane] = canvas
    return out


def footprint(canvas: JtmCanvas) -> set:
    """Set of (x, y) pixels differing from the background."""
    mask = (canvas.pixels != BACKGROUND).any(axis=2)
    ys, xs = np.nonzero(mask)
    return {(int(x), int(y)) for x, y in zip(xs, ys)}


def view_file_name(sample_id: str, angles: ViewAngles, plane: Plane) -> str:
    def fmt(a: float) -> str:
        return f"{a:g}"

    return f"{sample_id}__t{fmt(angles.theta)}_p{fmt(angles.psi)}__{plane.value}.png"


def write_manifest(rows: List[dict], path) -> None:
    """JSON-lines manifest: sample_id, label, theta, psi, plane, path."""
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    os.replace(tmp, path)


def read_manifest(path) -> List[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        return [json.loads(ln) for ln in fh if ln.strip()]
