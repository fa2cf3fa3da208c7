"""Synthetic before/after fixture pairs with ground truth.

Each pair shares a background and a set of distractor shapes; the after
image keeps the distractors (optionally displaced by a small jitter) and
drops the target shapes.  The ground truth marks the target pixels in the
before image.  Everything is a pure function of the seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class SynthSpec:
    height: int = 112
    width: int = 112
    target_count: int = 1
    distractor_count: int = 3
    displacement: int = 3
    min_radius_frac: float = 0.08
    max_radius_frac: float = 0.16
    margin_frac: float = 0.22
    noise_sigma: float = 0.01

    def __post_init__(self) -> None:
        if self.height < 8 or self.width < 8:
            raise ValueError("resolution too small for shape placement")
        if self.target_count < 0 or self.distractor_count < 0:
            raise ValueError("shape counts must be nonnegative")
        max_r = self.max_radius_frac * min(self.height, self.width)
        margin = self.margin_frac * min(self.height, self.width)
        usable_h = self.height - 2 * (margin + max_r + self.displacement)
        usable_w = self.width - 2 * (margin + max_r + self.displacement)
        if usable_h <= 0 or usable_w <= 0:
            raise ValueError("shapes do not fit the working resolution")


@dataclass
class SyntheticPair:
    before: np.ndarray
    after: np.ndarray
    gt: np.ndarray
    pair_id: str


def _background(rng: np.random.Generator, h: int, w: int, noise_sigma: float) -> np.ndarray:
    base = rng.uniform(0.25, 0.7, size=3)
    tilt = rng.uniform(-0.12, 0.12, size=3)
    rows = np.linspace(-0.5, 0.5, h)[:, None, None]
    img = base[None, None, :] + tilt[None, None, :] * rows
    if noise_sigma > 0:
        img = img + rng.normal(0.0, noise_sigma, size=(h, w, 3))
    return np.clip(img, 0.0, 1.0)


def _shape_mask(
    h: int, w: int, kind: str, cy: float, cx: float, radius: float
) -> np.ndarray:
    yy, xx = np.mgrid[0:h, 0:w]
    if kind == "disk":
        return (yy - cy) ** 2 + (xx - cx) ** 2 <= radius**2
    if kind == "square":
        return (np.abs(yy - cy) <= radius) & (np.abs(xx - cx) <= radius)
    raise ValueError(f"unknown shape kind {kind!r}")


def _contrasting_color(rng: np.random.Generator, background: np.ndarray) -> np.ndarray:
    # push the shape color away from the mean background on each channel
    mean = background.reshape(-1, 3).mean(axis=0)
    direction = np.where(mean < 0.5, 1.0, 0.0)
    return np.clip(direction * rng.uniform(0.75, 1.0, 3) + (1 - direction) * rng.uniform(0.0, 0.25, 3), 0, 1)


def generate_synthetic_pair(seed: int, spec: SynthSpec = SynthSpec()) -> SyntheticPair:
    """Deterministic fixture pair for the given seed."""
    rng = np.random.default_rng(seed)
    h, w = spec.height, spec.width
    scale = min(h, w)
    margin = spec.margin_frac * scale + spec.max_radius_frac * scale + spec.displacement

    before = _background(rng, h, w, spec.noise_sigma)
    after = before.copy()
    gt = np.zeros((h, w), dtype=bool)

    def place() -> tuple[str, float, float, float, np.ndarray]:
        kind = "disk" if rng.random() < 0.5 else "square"
        cy = rng.uniform(margin, h - margin)
        cx = rng.uniform(margin, w - margin)
        radius = rng.uniform(spec.min_radius_frac, spec.max_radius_frac) * scale
        color = _contrasting_color(rng, before)
        return kind, cy, cx, radius, color

    for _ in range(spec.distractor_count):
        kind, cy, cx, radius, color = place()
        dy, dx = rng.integers(-spec.displacement, spec.displacement + 1, size=2)
        before[_shape_mask(h, w, kind, cy, cx, radius)] = color
        after[_shape_mask(h, w, kind, cy + dy, cx + dx, radius)] = color

    for _ in range(spec.target_count):
        kind, cy, cx, radius, color = place()
        mask = _shape_mask(h, w, kind, cy, cx, radius)
        before[mask] = color
        gt |= mask

    to_u8 = lambda img: np.round(img * 255.0).astype(np.uint8)
    return SyntheticPair(
        before=to_u8(before), after=to_u8(after), gt=gt, pair_id=f"synth-{seed:05d}"
    )


def blurred_gt_saliency(gt: np.ndarray, sigma: float = 4.0) -> np.ndarray:
    """Stand-in saliency map: the ground truth softened by a Gaussian."""
    from scipy.ndimage import gaussian_filter

    soft = gaussian_filter(gt.astype(np.float64), sigma=sigma)
    peak = soft.max()
    return soft / peak if peak > 0 else soft


def write_fixture_dataset(
    out_dir: str | Path,
    seeds: list[int],
    spec: SynthSpec = SynthSpec(),
    saliency_sigma: float = 4.0,
) -> Path:
    """Write images, ground truths, saliency maps and a manifest; returns the
    manifest path."""
    from PIL import Image

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "manifest.jsonl"
    import json

    with open(manifest_path, "w") as fh:
        for seed in seeds:
            pair = generate_synthetic_pair(seed, spec)
            stem = pair.pair_id
            before_path = out_dir / f"{stem}_before.png"
            after_path = out_dir / f"{stem}_after.png"
            gt_path = out_dir / f"{stem}_gt.png"
            sal_path = out_dir / f"{stem}_saliency.png"
            Image.fromarray(pair.before, mode="RGB").save(before_path)
            Image.fromarray(pair.after, mode="RGB").save(after_path)
            Image.fromarray(np.where(pair.gt, 255, 0).astype(np.uint8), mode="L").save(gt_path)
            sal = blurred_gt_saliency(pair.gt, sigma=saliency_sigma)
            Image.fromarray(np.round(sal * 255.0).astype(np.uint8), mode="L").save(sal_path)
            record = {
                "id": stem,
                "before": before_path.name,
                "after": after_path.name,
                "gt": gt_path.name,
                "saliency": sal_path.name,
            }
            fh.write(json.dumps(record) + "\n")
    return manifest_path
