"""Command-line surface: encode, dataset, fuse, eval, ablate, viewgrid.

Flags beat config-file values, which beat defaults.  The config file is
plain ``key = value`` lines (``#`` comments); unknown keys are rejected.
Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import os
import sys
from typing import Dict, Optional

import click
import numpy as np

from . import __version__
from .encoding import EncodingParams, Level
from .errors import JtmError
from .evalkit import (
    EVAL_RENDER_OPTIONS,
    RenderRecord,
    export_dataset,
    parity_split,
    run_ablation,
    run_viewgrid,
)
from .fusion import FUSE_METHODS, load_csv, predict, save_csv
from .geometry import Plane, ViewAngles, ViewGrid, enumerate_views, identity_grid
from .rasterizer import (
    RenderOptions,
    render_all,
    view_file_name,
    write_manifest,
)
from .skeleton import SequenceFormat, parse_sequence, validate, write_sequence
from .synthetic import bundled_corpus, bundled_sample, direction_magnitude_specs, generate_synthetic

CONFIG_KEYS = {
    "s_min",
    "s_max",
    "b_min",
    "b_max",
    "level",
    "width",
    "height",
    "thickness",
    "margin",
}


def _load_config(path: Optional[str]) -> Dict[str, str]:
    if path is None:
        return {}
    cfg = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise click.UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (part.strip() for part in line.split("=", 1))
            if key not in CONFIG_KEYS:
                raise click.UsageError(f"{path}:{lineno}: unknown config key {key!r}")
            cfg[key] = val
    return cfg


def _merge(flag_value, cfg: Dict[str, str], key: str, cast, default):
    if flag_value is not None:
        return flag_value
    if key in cfg:
        return cast(cfg[key])
    return default


def _read_sequence(path: str, fmt: str, m: Optional[int]):
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    f = SequenceFormat.CANONICAL_JSON if fmt == "jsonl" else SequenceFormat.PLAIN_XYZ
    return parse_sequence(text, f, m=m)


def _params_and_options(cfg, level, s_min, s_max, b_min, b_max, size, thickness):
    params = EncodingParams(
        s_min=_merge(s_min, cfg, "s_min", float, 0.0),
        s_max=_merge(s_max, cfg, "s_max", float, 1.0),
        b_min=_merge(b_min, cfg, "b_min", float, 0.0),
        b_max=_merge(b_max, cfg, "b_max", float, 1.0),
        level=Level(_merge(level, cfg, "level", str, "full")),
    )
    options = RenderOptions(
        width=_merge(size, cfg, "width", int, 256),
        height=_merge(size, cfg, "height", int, 256),
        thickness=_merge(thickness, cfg, "thickness", int, 1),
        margin=_merge(None, cfg, "margin", float, 0.05),
    )
    return params, options


@click.group()
@click.version_option(__version__, prog_name="jtm")
def main():
    """Joint Trajectory Map toolkit: encode skeleton sequences into color
    trajectory images, fuse classifier scores and run desk-scale
    evaluations."""


@main.command()
@click.argument("sequence_file")
@click.option("--format", "fmt", type=click.Choice(["jsonl", "xyz"]), default="jsonl")
@click.option("--joints", "m", type=int, default=None, help="Joint count for xyz input.")
@click.option("--plane", type=click.Choice(["front", "top", "side", "all"]), default="all")
@click.option("--level", type=click.Choice([l.value for l in Level]), default=None)
@click.option("--theta", type=float, default=0.0, help="Polar rotation angle, degrees.")
@click.option("--psi", type=float, default=0.0, help="Azimuthal rotation angle, degrees.")
@click.option("--s-min", type=float, default=None)
@click.option("--s-max", type=float, default=None)
@click.option("--b-min", type=float, default=None)
@click.option("--b-max", type=float, default=None)
@click.option("--size", type=int, default=None, help="Canvas size in pixels (square).")
@click.option("--thickness", type=int, default=None, help="Line thickness in pixels.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out-dir", type=click.Path(), default=".", show_default=True)
def encode(
    sequence_file, fmt, m, plane, level, theta, psi,
    s_min, s_max, b_min, b_max, size, thickness, config_path, out_dir,
):
    """Render JTM image(s) for one sequence at one view."""
    try:
        cfg = _load_config(config_path)
        params, options = _params_and_options(
            cfg, level, s_min, s_max, b_min, b_max, size, thickness
        )
        seq = _read_sequence(sequence_file, fmt, m)
        problems = validate(seq)
        if problems:
            raise JtmError(f"invalid sequence: {problems[0]}")
        angles = ViewAngles(theta, psi)
        planes = list(Plane) if plane == "all" else [Plane(plane)]
        os.makedirs(out_dir, exist_ok=True)
        sample_id = seq.source_id or os.path.splitext(
            os.path.basename(sequence_file if sequence_file != "-" else "stdin")
        )[0]
        from .rasterizer import render_jtm

        rows = []
        for pl in planes:
            canvas = render_jtm(seq, pl, angles, params, options)
            fname = view_file_name(sample_id, angles, pl)
            canvas.save_png(os.path.join(out_dir, fname))
            rows.append(
                {
                    "sample_id": sample_id,
                    "label": "",
                    "theta": theta,
                    "psi": psi,
                    "plane": pl.value,
                    "path": fname,
                }
            )
            click.echo(fname)
        write_manifest(rows, os.path.join(out_dir, f"{sample_id}.manifest.jsonl"))
    except JtmError as e:
        raise click.ClickException(str(e))


@main.command()
@click.option("--corpus", "corpus_name", type=click.Choice(["bundled6", "dirmag4"]),
              default="bundled6", show_default=True,
              help="Which bundled synthetic corpus to render.")
@click.option("--per-class", type=int, default=4, show_default=True)
@click.option("--seed", type=int, default=20230917, show_default=True)
@click.option("--views", type=click.Choice(["identity", "default"]), default="identity",
              show_default=True, help="'default' renders the 28-view grid.")
@click.option("--level", type=click.Choice([l.value for l in Level]), default="full")
@click.option("--size", type=int, default=64, show_default=True)
@click.option("--thickness", type=int, default=2, show_default=True)
@click.option("--out-dir", type=click.Path(), required=True)
def dataset(corpus_name, per_class, seed, views, level, size, thickness, out_dir):
    """Batch-encode a synthetic corpus into a train/test image tree."""
    try:
        if corpus_name == "bundled6":
            corpus = bundled_corpus(per_class=per_class, seed=seed)
        else:
            corpus = generate_synthetic(direction_magnitude_specs(), per_class, seed)
        grid = enumerate_views() if views == "default" else identity_grid()
        params = EncodingParams(level=Level(level))
        options = RenderOptions(width=size, height=size, thickness=thickness)
        records = []
        index_of = {}
        for idx, (label, seq) in enumerate(corpus):
            sid = seq.source_id or f"s{idx:04d}"
            index_of[sid] = idx
            rendered = render_all(seq, grid, params, options)
            for view, by_plane in rendered.items():
                for pl, canvas in by_plane.items():
                    records.append(RenderRecord(sid, label, view, pl, canvas))
        counts = export_dataset(
            records, out_dir, lambda sid: parity_split(index_of[sid])
        )
        for split in sorted(counts):
            click.echo(f"{split}: {counts[split]} files")
    except JtmError as e:
        raise click.ClickException(str(e))


@main.command()
@click.argument("score_csvs", nargs=-1, required=True)
@click.option("--method", type=click.Choice(sorted(FUSE_METHODS)), default="multiply",
              show_default=True)
@click.option("--out", "out_csv", type=click.Path(), required=True)
@click.option("--predictions", type=click.Path(), default=None,
              help="Also write per-sample predicted labels (CSV).")
def fuse(score_csvs, method, out_csv, predictions):
    """Fuse two or more score CSVs elementwise."""
    if len(score_csvs) < 2:
        raise click.UsageError("need at least two score CSVs")
    try:
        matrices = [load_csv(p) for p in score_csvs]
        fused = FUSE_METHODS[method](matrices)
        save_csv(fused, out_csv)
        if predictions:
            lines = ["sample_id,label"]
            lines += [f"{sid},{lbl}" for sid, lbl in predict(fused)]
            tmp = predictions + ".tmp"
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write("\n".join(lines) + "\n")
            os.replace(tmp, predictions)
        click.echo(f"fused {len(score_csvs)} matrices with {method} -> {out_csv}")
    except JtmError as e:
        raise click.ClickException(str(e))


def _corpus_for(corpus_name: str, per_class: int, seed: int):
    if corpus_name == "bundled6":
        return bundled_corpus(per_class=per_class, seed=seed)
    return generate_synthetic(direction_magnitude_specs(), per_class, seed)


_corpus_options = [
    click.option("--corpus", "corpus_name", type=click.Choice(["bundled6", "dirmag4"]),
                 default="bundled6", show_default=True),
    click.option("--per-class", type=int, default=10, show_default=True),
    click.option("--seed", type=int, default=20230917, show_default=True),
    click.option("--k", type=int, default=1, show_default=True),
    click.option("--out", "out_csv", type=click.Path(), default=None,
                 help="Write the report as CSV."),
]


def corpus_options(fn):
    for opt in reversed(_corpus_options):
        fn = opt(fn)
    return fn


@main.command()
@corpus_options
@click.option("--levels", default="raw,hue,full", show_default=True,
              help="Comma-separated encoding levels.")
def ablate(corpus_name, per_class, seed, k, out_csv, levels):
    """Per-plane + fused accuracies across encoding levels."""
    try:
        lvls = [Level(v.strip()) for v in levels.split(",") if v.strip()]
        if not lvls:
            raise click.UsageError("no levels given")
        corpus = _corpus_for(corpus_name, per_class, seed)
        report = run_ablation(corpus, lvls, k=k)
        click.echo(report.pretty())
        if out_csv:
            with open(out_csv, "w", encoding="utf-8") as fh:
                fh.write(report.to_csv())
    except ValueError as e:
        raise click.UsageError(str(e))
    except JtmError as e:
        raise click.ClickException(str(e))


@main.command("eval")
@corpus_options
@click.option("--level", type=click.Choice([l.value for l in Level]), default="full",
              show_default=True)
def eval_cmd(corpus_name, per_class, seed, k, out_csv, level):
    """Single-level evaluation (per-plane + fused accuracy)."""
    try:
        corpus = _corpus_for(corpus_name, per_class, seed)
        report = run_ablation(corpus, [Level(level)], k=k)
        click.echo(report.pretty())
        if out_csv:
            with open(out_csv, "w", encoding="utf-8") as fh:
                fh.write(report.to_csv())
    except JtmError as e:
        raise click.ClickException(str(e))


@main.command()
@corpus_options
@click.option("--step", type=float, default=22.5, show_default=True)
@click.option("--range", "half_range", type=float, default=45.0, show_default=True,
              help="Grid covers [-range, +range] on both angles.")
@click.option("--level", type=click.Choice([l.value for l in Level]), default="full")
@click.option("--no-fuse-all", is_flag=True, default=False)
def viewgrid(corpus_name, per_class, seed, k, out_csv, step, half_range, level,
             no_fuse_all):
    """Fused accuracy per (theta, psi) view of a grid."""
    try:
        grid = enumerate_views(
            theta_range=(-half_range, half_range), theta_step=step,
            psi_range=(-half_range, half_range), psi_step=step,
        )
        corpus = _corpus_for(corpus_name, per_class, seed)
        report = run_viewgrid(
            corpus, grid, level=Level(level), k=k, fuse_all=not no_fuse_all
        )
        click.echo(report.to_csv().rstrip("\n"))
        if out_csv:
            with open(out_csv, "w", encoding="utf-8") as fh:
                fh.write(report.to_csv())
    except JtmError as e:
        raise click.ClickException(str(e))


@main.command()
@click.option("--what", type=click.Choice(["sample", "bundled6", "dirmag4"]),
              default="sample", show_default=True)
@click.option("--per-class", type=int, default=4, show_default=True)
@click.option("--seed", type=int, default=20230917, show_default=True)
@click.option("--out-dir", type=click.Path(), required=True)
def synth(what, per_class, seed, out_dir):
    """Write bundled synthetic sequences to disk (canonical JSON-lines)."""
    os.makedirs(out_dir, exist_ok=True)
    if what == "sample":
        seqs = [("", bundled_sample())]
    else:
        seqs = _corpus_for(what, per_class, seed)
    for idx, (label, seq) in enumerate(seqs):
        sid = seq.source_id or f"s{idx:04d}"
        path = os.path.join(out_dir, f"{sid}.jsonl")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(write_sequence(seq))
        click.echo(path)


if __name__ == "__main__":
    main()
