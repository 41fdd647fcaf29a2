"""Desk-scale evaluation: nearest-neighbor baseline, dataset export and the
ablation / view-grid experiment runners.

The nearest-neighbor baseline scores a test image per class with a softmin
over the mean pixel distance to the k closest training images of that class,
giving well-formed probability rows that plug straight into the score-fusion
stage.  It stands in for a fine-tuned network so the whole encode -> score
-> fuse -> predict contract stays testable without datasets or GPUs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .encoding import EncodingParams, Level
from .errors import DimMismatchError
from .fusion import ScoreMatrix, accuracy, multiply_fuse
from .geometry import Plane, ViewAngles, ViewGrid, identity_grid
from .rasterizer import (
    JtmCanvas,
    RenderOptions,
    RenderPlan,
    paint,
    prepare_render,
    view_file_name,
    write_manifest,
)
from .skeleton import SkeletonSequence

# evaluation renders use a small canvas and slightly thick lines so jittered
# samples of one class still overlap in pixel space
EVAL_RENDER_OPTIONS = RenderOptions(width=64, height=64, thickness=2)


def knn_scores(
    train: Sequence[Tuple[str, np.ndarray]],
    test: Sequence[Tuple[str, np.ndarray]],
    k: int = 1,
) -> ScoreMatrix:
    """Class scores for test images from labeled train images (L2 on pixels).

    train: (class_label, image array) pairs; test: (sample_id, image array).
    Rows are softmin distributions over the per-class mean distance to the k
    nearest neighbors, so they are non-negative and sum to 1.
    """
    if not train:
        raise ValueError("train set is empty")
    shape = train[0][1].shape
    for _, img in list(train) + [(None, t[1]) for t in test]:
        if img.shape != shape:
            raise DimMismatchError(f"image shape {img.shape} != {shape}")
    labels = sorted({lbl for lbl, _ in train})
    train_x = np.stack([img.reshape(-1) for _, img in train]).astype(np.float64)
    test_x = np.stack([img.reshape(-1) for _, img in test]).astype(np.float64)
    # pairwise L2 distances, (tests, trains)
    d2 = (
        (test_x ** 2).sum(axis=1)[:, None]
        + (train_x ** 2).sum(axis=1)[None, :]
        - 2.0 * test_x @ train_x.T
    )
    dist = np.sqrt(np.maximum(d2, 0.0))
    per_class = np.empty((len(test), len(labels)))
    for ci, lbl in enumerate(labels):
        cols = [i for i, (l, _) in enumerate(train) if l == lbl]
        dc = np.sort(dist[:, cols], axis=1)[:, : min(k, len(cols))]
        per_class[:, ci] = dc.mean(axis=1)
    # softmin, scaled by the per-row mean distance so scores are unit-free
    temp = np.maximum(per_class.mean(axis=1, keepdims=True), 1e-12)
    logits = -per_class / temp
    logits -= logits.max(axis=1, keepdims=True)
    ex = np.exp(logits)
    scores = ex / ex.sum(axis=1, keepdims=True)
    return ScoreMatrix(tuple(sid for sid, _ in test), tuple(labels), scores)


@dataclass(frozen=True)
class RenderRecord:
    sample_id: str
    label: str
    view: ViewAngles
    plane: Plane
    canvas: JtmCanvas


def export_dataset(
    records: Sequence[RenderRecord],
    out_dir,
    split_of: Callable[[str], str],
) -> Dict[str, int]:
    """Write ``out_dir/<split>/<plane>/<label>/<file>.png`` plus a manifest;
    returns per-split file counts."""
    out_dir = os.fspath(out_dir)
    counts: Dict[str, int] = {}
    manifest_rows = []
    for rec in records:
        split = split_of(rec.sample_id)
        fname = view_file_name(rec.sample_id, rec.view, rec.plane)
        rel = os.path.join(split, rec.plane.value, rec.label, fname)
        full = os.path.join(out_dir, rel)
        os.makedirs(os.path.dirname(full), exist_ok=True)
        rec.canvas.save_png(full)
        counts[split] = counts.get(split, 0) + 1
        manifest_rows.append(
            {
                "sample_id": rec.sample_id,
                "label": rec.label,
                "theta": rec.view.theta,
                "psi": rec.view.psi,
                "plane": rec.plane.value,
                "path": rel,
            }
        )
    write_manifest(manifest_rows, os.path.join(out_dir, "manifest.jsonl"))
    return counts


def parity_split(sample_index: int) -> str:
    """Fixed 50/50 protocol: even sample indices train, odd test."""
    return "train" if sample_index % 2 == 0 else "test"


@dataclass(frozen=True)
class LevelResult:
    level: Level
    front: float
    top: float
    side: float
    fusion: float


@dataclass(frozen=True)
class ExperimentReport:
    rows: Tuple[LevelResult, ...]

    def to_csv(self) -> str:
        lines = ["level,front,top,side,fusion"]
        for r in self.rows:
            lines.append(
                f"{r.level.value},{r.front:.4f},{r.top:.4f},{r.side:.4f},{r.fusion:.4f}"
            )
        return "\n".join(lines) + "\n"

    def pretty(self) -> str:
        header = f"{'level':<14}{'front':>8}{'top':>8}{'side':>8}{'fusion':>8}"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            lines.append(
                f"{r.level.value:<14}{r.front:>8.3f}{r.top:>8.3f}"
                f"{r.side:>8.3f}{r.fusion:>8.3f}"
            )
        return "\n".join(lines)


@dataclass
class _PreparedCorpus:
    sample_ids: List[str]
    labels: Dict[str, str]
    split: Dict[str, str]
    plans: Dict[Tuple[str, Plane], RenderPlan]


def _prepare_corpus(
    corpus: Sequence[Tuple[str, SkeletonSequence]],
    view: ViewAngles,
    options: RenderOptions,
) -> _PreparedCorpus:
    sample_ids, labels, split, plans = [], {}, {}, {}
    for idx, (label, seq) in enumerate(corpus):
        sid = seq.source_id or f"s{idx:04d}"
        sample_ids.append(sid)
        labels[sid] = label
        split[sid] = parity_split(idx)
        for plane in Plane:
            plans[(sid, plane)] = prepare_render(seq, plane, view, options)
    return _PreparedCorpus(sample_ids, labels, split, plans)


def _score_level(
    prep: _PreparedCorpus, params: EncodingParams, k: int
) -> Tuple[Dict[Plane, ScoreMatrix], ScoreMatrix]:
    per_plane: Dict[Plane, ScoreMatrix] = {}
    for plane in Plane:
        train, test = [], []
        for sid in prep.sample_ids:
            img = paint(prep.plans[(sid, plane)], params).to_8bit()
            if prep.split[sid] == "train":
                train.append((prep.labels[sid], img))
            else:
                test.append((sid, img))
        per_plane[plane] = knn_scores(train, test, k=k)
    fused = multiply_fuse([per_plane[p] for p in Plane])
    return per_plane, fused


def run_ablation(
    corpus: Sequence[Tuple[str, SkeletonSequence]],
    levels: Sequence[Level],
    view: ViewAngles = ViewAngles(0.0, 0.0),
    options: RenderOptions = EVAL_RENDER_OPTIONS,
    k: int = 1,
    base_params: EncodingParams = EncodingParams(),
) -> ExperimentReport:
    """Per-plane and multiply-fused nearest-neighbor accuracies at each
    encoding level, on the fixed parity split."""
    prep = _prepare_corpus(corpus, view, options)
    rows = []
    for level in levels:
        params = EncodingParams(
            s_min=base_params.s_min,
            s_max=base_params.s_max,
            b_min=base_params.b_min,
            b_max=base_params.b_max,
            level=level,
            partition=base_params.partition,
        )
        per_plane, fused = _score_level(prep, params, k)
        accs = {
            plane: accuracy(per_plane[plane], prep.labels) for plane in Plane
        }
        rows.append(
            LevelResult(
                level=level,
                front=accs[Plane.FRONT],
                top=accs[Plane.TOP],
                side=accs[Plane.SIDE],
                fusion=accuracy(fused, prep.labels),
            )
        )
    return ExperimentReport(tuple(rows))


@dataclass(frozen=True)
class ViewGridReport:
    cells: Tuple[Tuple[ViewAngles, float], ...]  # per-view fused accuracy
    fused_all: Optional[float]  # multiplying scores across every view

    def to_csv(self) -> str:
        lines = ["theta,psi,fused_accuracy"]
        for view, acc in self.cells:
            lines.append(f"{view.theta:g},{view.psi:g},{acc:.4f}")
        if self.fused_all is not None:
            lines.append(f"all,all,{self.fused_all:.4f}")
        return "\n".join(lines) + "\n"


def run_viewgrid(
    corpus: Sequence[Tuple[str, SkeletonSequence]],
    grid: ViewGrid,
    level: Level = Level.FULL,
    options: RenderOptions = EVAL_RENDER_OPTIONS,
    k: int = 1,
    fuse_all: bool = True,
) -> ViewGridReport:
    """Fused three-plane accuracy per view, plus (optionally) one accuracy
    from multiplying the score matrices of every view and plane."""
    params = EncodingParams(level=level)
    cells = []
    all_matrices = []
    labels = None
    for view in grid:
        prep = _prepare_corpus(corpus, view, options)
        per_plane, fused = _score_level(prep, params, k)
        cells.append((view, accuracy(fused, prep.labels)))
        all_matrices.extend(per_plane[p] for p in Plane)
        labels = prep.labels
    fused_all = None
    if fuse_all and len(all_matrices) >= 2:
        fused_all = accuracy(multiply_fuse(all_matrices), labels)
    return ViewGridReport(tuple(cells), fused_all)
