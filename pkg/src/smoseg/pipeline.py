"""End-to-end pair processing, dataset evaluation, and the alpha sweep.

A manifest is JSON Lines, one pair per line, with paths resolved relative
to the manifest file.  All dataset operations process pairs independently
(optionally on a worker pool) and reduce metrics by exact dataset-wide
count summation, so results never depend on worker count or ordering.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .config import PipelineConfig
from .contrast import ContrastMap, contrast_map
from .features import (
    FeatureField,
    builtin_feature_field,
    load_feature_field,
    pool_superpixel_features,
    upscale_field,
)
from .fusion import (
    BinaryMask,
    FusionParams,
    ProbabilityMap,
    SaliencyMap,
    fuse,
    load_saliency,
    threshold_mask,
)
from .metrics import EvalReport, pr_roc_sweep
from .slic import segment_slic


@dataclass
class ImagePair:
    """One before/after record; rasters may be in memory or on disk."""

    pair_id: str
    before: np.ndarray | str | Path
    after: np.ndarray | str | Path
    gt: np.ndarray | str | Path | None = None
    saliency: np.ndarray | str | Path | None = None
    features_before: str | Path | None = None
    features_after: str | Path | None = None


@dataclass
class PairResult:
    contrast: ContrastMap
    prob: ProbabilityMap
    mask: BinaryMask | None
    saliency: SaliencyMap | None
    gt: np.ndarray | None


@dataclass
class DatasetResult:
    reports: dict[str, EvalReport]
    pair_ids: list[str]
    failures: list[tuple[str, str]] = field(default_factory=list)


def load_image(source: np.ndarray | str | Path) -> np.ndarray:
    """RGB uint8 raster from an array or an image file."""
    if isinstance(source, np.ndarray):
        if source.ndim != 3 or source.shape[2] != 3:
            raise ValueError(f"expected (H, W, 3) image, got shape {source.shape}")
        if source.dtype == np.uint8:
            return source
        return np.round(np.clip(source.astype(np.float64), 0, 1) * 255).astype(np.uint8)
    with Image.open(source) as img:
        return np.asarray(img.convert("RGB"))


def load_mask(source: np.ndarray | str | Path) -> np.ndarray:
    """Boolean mask from an array or an 8-bit grayscale file."""
    if isinstance(source, np.ndarray):
        return source.astype(bool)
    with Image.open(source) as img:
        return np.asarray(img.convert("L")) > 127


def resize_image(image: np.ndarray, resolution: tuple[int, int]) -> np.ndarray:
    h, w = resolution
    if image.shape[:2] == (h, w):
        return image
    return np.asarray(Image.fromarray(image, mode="RGB").resize((w, h), Image.BILINEAR))


def resize_mask(mask: np.ndarray, resolution: tuple[int, int]) -> np.ndarray:
    h, w = resolution
    if mask.shape == (h, w):
        return mask
    img = Image.fromarray(mask.astype(np.uint8) * 255, mode="L")
    return np.asarray(img.resize((w, h), Image.NEAREST)) > 127


def resize_map(values: np.ndarray, resolution: tuple[int, int]) -> np.ndarray:
    h, w = resolution
    if values.shape == (h, w):
        return values
    img = Image.fromarray(values.astype(np.float32), mode="F")
    return np.clip(np.asarray(img.resize((w, h), Image.BILINEAR), dtype=np.float64), 0.0, 1.0)


def read_manifest(path: str | Path) -> list[ImagePair]:
    """Parse a JSONL manifest; relative paths are anchored at the manifest."""
    path = Path(path)
    base = path.parent
    pairs = []
    for line_no, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        record = json.loads(line)
        if "id" not in record or "before" not in record or "after" not in record:
            raise ValueError(f"{path}:{line_no}: manifest record needs id/before/after")

        def resolve(key: str):
            value = record.get(key)
            if value is None:
                return None
            value = Path(value)
            return value if value.is_absolute() else base / value

        pairs.append(
            ImagePair(
                pair_id=str(record["id"]),
                before=resolve("before"),
                after=resolve("after"),
                gt=resolve("gt"),
                saliency=resolve("saliency"),
                features_before=resolve("features_before"),
                features_after=resolve("features_after"),
            )
        )
    return pairs


def write_manifest(pairs: list[ImagePair], path: str | Path) -> None:
    with open(path, "w") as fh:
        for pair in pairs:
            record = {"id": pair.pair_id, "before": str(pair.before), "after": str(pair.after)}
            for key in ("gt", "saliency", "features_before", "features_after"):
                value = getattr(pair, key)
                if value is not None:
                    record[key] = str(value)
            fh.write(json.dumps(record) + "\n")


def _feature_field_for(
    config: PipelineConfig, image: np.ndarray, fmap_path: str | Path | None
) -> FeatureField:
    if config.feature_backend == "builtin":
        return builtin_feature_field(image, window=config.builtin_window)
    if fmap_path is None:
        raise ValueError("feature_backend=file requires a feature file per image")
    fld = upscale_field(load_feature_field(fmap_path), config.upscale_factor)
    if (fld.height, fld.width) != tuple(config.working_resolution):
        raise ValueError(
            f"{fmap_path}: upscaled field is {fld.height}x{fld.width}, "
            f"expected {config.working_resolution}"
        )
    return fld


def _saliency_for(
    config: PipelineConfig, pair: ImagePair
) -> SaliencyMap | None:
    if pair.saliency is None:
        return None
    if isinstance(pair.saliency, np.ndarray):
        sal = SaliencyMap(values=pair.saliency, source_tag=f"{pair.pair_id}:array")
    else:
        sal = load_saliency(pair.saliency)
    values = resize_map(sal.values, tuple(config.working_resolution))
    return SaliencyMap(values=values, source_tag=sal.source_tag)


def run_pair(
    config: PipelineConfig,
    pair: ImagePair,
    alpha: float | None = None,
    threshold: float | None = None,
    jobs: int = 1,
) -> PairResult:
    """Resize, segment, featurize, and score one before/after pair.

    When the pair carries no saliency source the fusion input is a zero
    map, which reduces the fused output to the normalized contrast map.
    """
    resolution = tuple(config.working_resolution)
    before = resize_image(load_image(pair.before), resolution)
    after = resize_image(load_image(pair.after), resolution)

    labeling_b = segment_slic(before, config.slic)
    labeling_a = segment_slic(after, config.slic)
    feats_b = _pool(config, before, pair.features_before, labeling_b)
    feats_a = _pool(config, after, pair.features_after, labeling_a)

    cmap = contrast_map(labeling_b, labeling_a, feats_b, feats_a, jobs=jobs)

    saliency = _saliency_for(config, pair)
    sal_values = saliency.values if saliency is not None else np.zeros(resolution)
    prob = fuse(
        SaliencyMap(values=sal_values, source_tag=saliency.source_tag if saliency else "none"),
        cmap,
        FusionParams(alpha=config.alpha if alpha is None else alpha),
    )
    mask = threshold_mask(prob, threshold) if threshold is not None else None

    gt = None
    if pair.gt is not None:
        gt = resize_mask(load_mask(pair.gt), resolution)
    return PairResult(contrast=cmap, prob=prob, mask=mask, saliency=saliency, gt=gt)


def _pool(config, image, fmap_path, labeling):
    return pool_superpixel_features(_feature_field_for(config, image, fmap_path), labeling)


def _pair_maps_task(args):
    config, pair, alpha = args
    result = run_pair(config, pair, alpha=alpha)
    if result.gt is None:
        raise ValueError(f"pair {pair.pair_id}: ground truth required")
    return (
        pair.pair_id,
        result.contrast.values,
        result.prob.values,
        result.saliency.values if result.saliency is not None else None,
        result.gt,
    )


def _collect_pair_maps(
    config: PipelineConfig,
    pairs: list[ImagePair],
    alpha: float | None,
    jobs: int,
    fail_fast: bool,
):
    """Per-pair (contrast, fused, saliency, gt) maps, skipping recorded failures."""
    outputs = {}
    failures: list[tuple[str, str]] = []
    tasks = [(config, pair, alpha) for pair in pairs]
    if jobs > 1 and len(pairs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(_pair_maps_task, t): t[1].pair_id for t in tasks}
            for future, pair_id in futures.items():
                try:
                    result = future.result()
                    outputs[result[0]] = result[1:]
                except Exception as exc:
                    if fail_fast:
                        raise
                    failures.append((pair_id, f"{type(exc).__name__}: {exc}"))
    else:
        for task in tasks:
            try:
                result = _pair_maps_task(task)
                outputs[result[0]] = result[1:]
            except Exception as exc:
                if fail_fast:
                    raise
                failures.append((task[1].pair_id, f"{type(exc).__name__}: {exc}"))
    ordered = [(p.pair_id, *outputs[p.pair_id]) for p in pairs if p.pair_id in outputs]
    return ordered, failures


def evaluate_dataset(
    config: PipelineConfig,
    pairs: list[ImagePair],
    jobs: int = 1,
    fail_fast: bool = False,
    alpha: float | None = None,
) -> DatasetResult:
    """Micro-averaged reports for the fused map, the contrast map alone,
    and (when every processed pair supplied one) the saliency map alone."""
    maps, failures = _collect_pair_maps(config, pairs, alpha, jobs, fail_fast)
    if not maps:
        raise ValueError("no pair processed successfully")
    gts = [m[4] for m in maps]
    grid = np.asarray(config.threshold_grid)
    reports = {
        "fused": pr_roc_sweep([m[2] for m in maps], gts, grid, config.beta_squared),
        "contrast": pr_roc_sweep([m[1] for m in maps], gts, grid, config.beta_squared),
    }
    saliencies = [m[3] for m in maps]
    if all(s is not None for s in saliencies):
        reports["saliency"] = pr_roc_sweep(saliencies, gts, grid, config.beta_squared)
    return DatasetResult(
        reports=reports, pair_ids=[m[0] for m in maps], failures=failures
    )


def sweep_alpha(
    config: PipelineConfig,
    pairs: list[ImagePair],
    grid: list[float] | None = None,
    jobs: int = 1,
    fail_fast: bool = False,
) -> list[tuple[float, float, float]]:
    """(alpha, F-beta-max, AUC) per grid value, reusing cached contrast maps.

    The contrast computation does not depend on alpha, so pairs are
    processed once and only the fusion + evaluation repeat per alpha.
    """
    if grid is None:
        grid = [round(0.1 * i, 1) for i in range(11)]
    if any(a < 0 or a > 1 for a in grid):
        raise ValueError("alpha grid must lie within [0, 1]")
    maps, failures = _collect_pair_maps(config, pairs, None, jobs, fail_fast)
    if not maps:
        raise ValueError("no pair processed successfully")
    thresholds = np.asarray(config.threshold_grid)

    rows = []
    for alpha in sorted(grid):
        fused = []
        gts = []
        for _, contrast_values, _, sal_values, gt in maps:
            sal = sal_values if sal_values is not None else np.zeros_like(contrast_values)
            combined = alpha * sal + contrast_values
            peak = combined.max()
            fused.append(combined / peak if peak > 0 else np.zeros_like(combined))
            gts.append(gt)
        report = pr_roc_sweep(fused, gts, thresholds, config.beta_squared)
        rows.append((alpha, report.f_beta_max, report.auc))
    return rows


OVERLAY_TINT = np.array([255.0, 0.0, 0.0])
OVERLAY_STRENGTH = 0.5


def render_overlay(image: np.ndarray, prob: ProbabilityMap) -> np.ndarray:
    """Heat overlay: out = round((1 - s*p) * image + s*p * (255, 0, 0)).

    s is OVERLAY_STRENGTH; a zero map returns the image unchanged and a
    value of 1 applies the maximum tint.
    """
    image = load_image(image)
    if image.shape[:2] != prob.values.shape:
        raise ValueError(
            f"dimension mismatch: image {image.shape[:2]} vs map {prob.values.shape}"
        )
    weight = (OVERLAY_STRENGTH * prob.values)[:, :, None]
    blended = (1.0 - weight) * image.astype(np.float64) + weight * OVERLAY_TINT
    return np.round(blended).astype(np.uint8)
