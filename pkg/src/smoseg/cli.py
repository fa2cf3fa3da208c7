"""Command-line interface.

Exit codes: 0 success, 1 input error, 2 dataset run finished with recorded
per-pair failures.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import PipelineConfig, load_config
from .fusion import save_map_fmap, save_map_png, save_mask_png
from .pipeline import (
    ImagePair,
    evaluate_dataset,
    read_manifest,
    render_overlay,
    run_pair,
    sweep_alpha,
)
from .synth import SynthSpec, write_fixture_dataset


def _build_config(config_path, backend, alpha) -> PipelineConfig:
    cfg = load_config(config_path) if config_path else PipelineConfig()
    overrides = {}
    if backend is not None:
        overrides["feature_backend"] = backend
    if alpha is not None:
        overrides["alpha"] = alpha
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides)
    return cfg


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@click.group()
def main() -> None:
    """Segment salient missing objects in before/after image pairs."""


common_options = [
    click.option("--config", "config_path", type=click.Path(exists=True), default=None,
                 help="TOML config file."),
    click.option("--backend", type=click.Choice(["builtin", "file"]), default=None,
                 help="Feature backend override."),
    click.option("--alpha", type=float, default=None, help="Saliency fusion weight."),
    click.option("--out-dir", type=click.Path(), default="out", show_default=True),
    click.option("--jobs", type=int, default=1, show_default=True),
]


def add_options(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn

    return wrap


@main.command()
@click.option("--before", required=True, type=click.Path(exists=True))
@click.option("--after", required=True, type=click.Path(exists=True))
@click.option("--saliency", type=click.Path(exists=True), default=None)
@click.option("--features-before", type=click.Path(exists=True), default=None)
@click.option("--features-after", type=click.Path(exists=True), default=None)
@click.option("--threshold", type=float, default=None,
              help="Binarization threshold in [0, 1]; mask written only when given.")
@click.option("--pair-id", default="pair", show_default=True)
@add_options(common_options)
def segment(before, after, saliency, features_before, features_after, threshold,
            pair_id, config_path, backend, alpha, out_dir, jobs):
    """Process one pair and write contrast/probability maps (and mask)."""
    try:
        cfg = _build_config(config_path, backend, alpha)
        pair = ImagePair(
            pair_id=pair_id, before=before, after=after, saliency=saliency,
            features_before=features_before, features_after=features_after,
        )
        result = run_pair(cfg, pair, threshold=threshold, jobs=jobs)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_map_png(result.contrast.values, out / f"{pair_id}_contrast.png")
    save_map_fmap(result.contrast.values, out / f"{pair_id}_contrast.fmap")
    # unnormalized components ride along for debugging
    save_map_fmap(result.contrast.local_component, out / f"{pair_id}_contrast_local.fmap")
    save_map_fmap(result.contrast.neigh_component, out / f"{pair_id}_contrast_neigh.fmap")
    save_map_png(result.prob.values, out / f"{pair_id}_prob.png")
    save_map_fmap(result.prob.values, out / f"{pair_id}_prob.fmap")
    if result.mask is not None:
        save_mask_png(result.mask, out / f"{pair_id}_mask.png")
    click.echo(f"wrote maps for {pair_id} to {out}")


@main.command()
@click.option("--manifest", required=True, type=click.Path(exists=True))
@click.option("--fail-fast", is_flag=True, default=False)
@add_options(common_options)
def evaluate(manifest, fail_fast, config_path, backend, alpha, out_dir, jobs):
    """Evaluate a manifest dataset and write per-map reports."""
    try:
        cfg = _build_config(config_path, backend, alpha)
        pairs = read_manifest(manifest)
        result = evaluate_dataset(cfg, pairs, jobs=jobs, fail_fast=fail_fast)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, report in result.reports.items():
        report.write_json(out / f"report_{name}.json")
        report.write_csv(out / f"curve_{name}.csv")
        click.echo(
            f"{name}: F_beta_max={report.f_beta_max:.4f} AUC={report.auc:.4f}"
        )
    if result.failures:
        (out / "failures.json").write_text(json.dumps(result.failures, indent=2))
        click.echo(f"{len(result.failures)} pair(s) failed; recorded", err=True)
        sys.exit(2)


@main.command()
@click.option("--manifest", required=True, type=click.Path(exists=True))
@click.option("--grid", default="0:1:0.1", show_default=True,
              help="Alpha grid start:stop:step (inclusive).")
@click.option("--fail-fast", is_flag=True, default=False)
@add_options(common_options)
def sweep(manifest, grid, fail_fast, config_path, backend, alpha, out_dir, jobs):
    """Sweep the fusion weight over a grid and tabulate F-beta-max / AUC."""
    try:
        start, stop, step = (float(v) for v in grid.split(":"))
        count = int(round((stop - start) / step)) + 1
        values = [round(start + i * step, 10) for i in range(count)]
        cfg = _build_config(config_path, backend, alpha)
        pairs = read_manifest(manifest)
        rows = sweep_alpha(cfg, pairs, values, jobs=jobs, fail_fast=fail_fast)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table_path = out / "alpha_sweep.csv"
    with open(table_path, "w") as fh:
        fh.write("alpha,f_beta_max,auc\n")
        for a, fb, auc in rows:
            fh.write(f"{a},{fb},{auc}\n")
    click.echo(f"{'alpha':>6} {'F_beta_max':>11} {'AUC':>8}")
    for a, fb, auc in rows:
        click.echo(f"{a:>6.2f} {fb:>11.4f} {auc:>8.4f}")
    click.echo(f"table written to {table_path}")


@main.command()
@click.option("--count", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--height", type=int, default=112, show_default=True)
@click.option("--width", type=int, default=112, show_default=True)
@click.option("--targets", type=int, default=1, show_default=True)
@click.option("--distractors", type=int, default=3, show_default=True)
@click.option("--displacement", type=int, default=3, show_default=True)
@click.option("--out-dir", type=click.Path(), default="synth", show_default=True)
def synth(count, seed, height, width, targets, distractors, displacement, out_dir):
    """Generate a synthetic fixture dataset with a manifest."""
    try:
        spec = SynthSpec(
            height=height, width=width, target_count=targets,
            distractor_count=distractors, displacement=displacement,
        )
        manifest = write_fixture_dataset(out_dir, list(range(seed, seed + count)), spec)
    except ValueError as exc:
        _fail(str(exc))
    click.echo(f"manifest written to {manifest}")


@main.command()
@click.option("--image", required=True, type=click.Path(exists=True))
@click.option("--prob", "prob_path", required=True, type=click.Path(exists=True),
              help="Probability map (PNG or FMAP with depth 1).")
@click.option("--out", required=True, type=click.Path())
def overlay(image, prob_path, out):
    """Render a heat overlay of a probability map on an image."""
    from PIL import Image as PilImage

    from .fusion import ProbabilityMap, load_saliency
    from .pipeline import load_image, resize_map

    try:
        sal = load_saliency(prob_path)
        img = load_image(image)
        values = resize_map(sal.values, img.shape[:2])
        rendered = render_overlay(img, ProbabilityMap(values=values))
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    PilImage.fromarray(rendered, mode="RGB").save(out)
    click.echo(f"overlay written to {out}")


if __name__ == "__main__":
    main()
