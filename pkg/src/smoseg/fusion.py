"""Fuse a visual-saliency map with the contrast map and threshold it.

The fused probability map is (alpha * saliency + contrast) normalized by its
maximum; the binary mask keeps pixels at or above the threshold, so T=0 is
the all-positive end of the sweep.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .contrast import ContrastMap
from .features import FeatureField, load_feature_field, save_feature_field


@dataclass
class SaliencyMap:
    """Per-pixel visual saliency in [0, 1] with a provenance tag."""

    values: np.ndarray
    source_tag: str = ""

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.size == 0:
            raise ValueError("saliency map must be nonempty 2-D")
        if not np.all(np.isfinite(values)):
            raise ValueError("saliency map contains non-finite values")
        if values.min() < 0.0 or values.max() > 1.0:
            raise ValueError("saliency values must lie in [0, 1]")
        self.values = values


@dataclass(frozen=True)
class FusionParams:
    alpha: float = 0.6

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")


@dataclass
class ProbabilityMap:
    """Per-pixel probability of belonging to the missing objects, in [0, 1]."""

    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.ndim != 2 or self.values.size == 0:
            raise ValueError("probability map must be nonempty 2-D")


@dataclass
class BinaryMask:
    values: np.ndarray
    threshold_used: float


def load_saliency(path: str | Path) -> SaliencyMap:
    """Load a saliency map from grayscale PNG (8/16-bit) or FMAP with D=1.

    Integer formats are rescaled by their format maximum; real-valued FMAP
    data outside [0, 1] is clamped with a warning.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    if path.suffix.lower() == ".fmap":
        field = load_feature_field(path)
        if field.depth != 1:
            raise ValueError(f"{path}: saliency FMAP must have depth 1, got {field.depth}")
        values = field.values[:, :, 0].astype(np.float64)
        clamped = np.clip(values, 0.0, 1.0)
        if not np.array_equal(values, clamped):
            warnings.warn(f"{path}: saliency values clamped to [0, 1]", stacklevel=2)
        return SaliencyMap(values=clamped, source_tag=str(path))

    with Image.open(path) as img:
        if img.mode == "L":
            scale = 255.0
        elif img.mode in ("I;16", "I"):
            scale = 65535.0
        else:
            raise ValueError(f"{path}: expected single-channel grayscale, got mode {img.mode}")
        arr = np.asarray(img, dtype=np.float64)
    return SaliencyMap(values=arr / scale, source_tag=str(path))


def fuse(saliency: SaliencyMap, contrast: ContrastMap, params: FusionParams) -> ProbabilityMap:
    """Weighted combination of saliency and contrast, normalized by its max."""
    if saliency.values.shape != contrast.values.shape:
        raise ValueError(
            f"dimension mismatch: saliency {saliency.values.shape} "
            f"vs contrast {contrast.values.shape}"
        )
    combined = params.alpha * saliency.values + contrast.values
    peak = combined.max()
    values = combined / peak if peak > 0 else np.zeros_like(combined)
    return ProbabilityMap(values=values)


def threshold_mask(prob: ProbabilityMap, threshold: float) -> BinaryMask:
    """Pixels at or above the threshold become foreground."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    return BinaryMask(values=prob.values >= threshold, threshold_used=threshold)


def save_map_png(values: np.ndarray, path: str | Path) -> None:
    """Store a [0, 1] map as 8-bit grayscale PNG."""
    arr = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    Image.fromarray(np.round(arr * 255.0).astype(np.uint8), mode="L").save(path, format="PNG")


def save_mask_png(mask: BinaryMask, path: str | Path) -> None:
    """Store a binary mask as 0/255 8-bit PNG."""
    arr = np.where(mask.values, 255, 0).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path, format="PNG")


def save_map_fmap(values: np.ndarray, path: str | Path) -> None:
    """Store a per-pixel map as a depth-1 FMAP file."""
    save_feature_field(FeatureField(values=np.asarray(values)[:, :, None]), path)
