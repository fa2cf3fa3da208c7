"""SLIC superpixel segmentation with adjacency and boundary structure.

The implementation follows the classic local k-means formulation in CIELAB
space and is fully deterministic: cluster centers start on a regular grid
(no gradient perturbation, no RNG), pixel-to-center ties go to the lowest
center index, and connectivity enforcement merges undersized 4-connected
fragments into their largest 4-adjacent region.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from skimage.color import rgb2lab


@dataclass(frozen=True)
class SlicParams:
    region_count_target: int = 400
    compactness: float = 10.0
    iterations: int = 10
    min_region_fraction: float = 0.25

    def __post_init__(self) -> None:
        if self.region_count_target < 1:
            raise ValueError("region_count_target must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.compactness <= 0:
            raise ValueError("compactness must be positive")
        if not 0 < self.min_region_fraction < 1:
            raise ValueError("min_region_fraction must lie in (0, 1)")


@dataclass
class SuperpixelLabeling:
    """Per-pixel label grid plus the derived region structure.

    labels is an H x W int array with values 0..count-1 and no gaps; each
    region is 4-connected.  adjacency[k] holds the labels sharing a
    4-neighboring pixel pair with region k, boundary_set the labels owning
    at least one image-border pixel.
    """

    labels: np.ndarray
    count: int
    adjacency: list[set[int]] = field(repr=False)
    boundary_set: set[int] = field(repr=False)
    pixel_counts: np.ndarray = field(repr=False)

    @classmethod
    def from_label_grid(cls, labels: np.ndarray) -> "SuperpixelLabeling":
        """Build the full structure from a bare label grid.

        The grid must already use contiguous labels 0..count-1.
        """
        labels = np.ascontiguousarray(labels, dtype=np.int32)
        if labels.ndim != 2 or labels.size == 0:
            raise ValueError("label grid must be a nonempty 2-D array")
        count = int(labels.max()) + 1
        counts = np.bincount(labels.ravel(), minlength=count)
        if np.any(counts == 0):
            raise ValueError("label grid has gaps in its label range")
        return cls(
            labels=labels,
            count=count,
            adjacency=compute_adjacency(labels, count),
            boundary_set=boundary_labels(labels),
            pixel_counts=counts,
        )

    def pixel_set(self, label: int) -> np.ndarray:
        """(n, 2) array of (row, col) coordinates of the region's pixels."""
        ys, xs = np.nonzero(self.labels == label)
        return np.stack([ys, xs], axis=1)


def compute_adjacency(labels: np.ndarray, count: int | None = None) -> list[set[int]]:
    """4-connectivity region adjacency: symmetric, irreflexive."""
    labels = np.asarray(labels)
    if count is None:
        count = int(labels.max()) + 1
    vert = np.stack([labels[:-1, :].ravel(), labels[1:, :].ravel()], axis=1)
    horz = np.stack([labels[:, :-1].ravel(), labels[:, 1:].ravel()], axis=1)
    pairs = np.concatenate([vert, horz], axis=0)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    adjacency: list[set[int]] = [set() for _ in range(count)]
    if pairs.size:
        pairs = np.unique(pairs, axis=0)
        for u, v in pairs:
            adjacency[int(u)].add(int(v))
            adjacency[int(v)].add(int(u))
    return adjacency


def boundary_labels(labels: np.ndarray) -> set[int]:
    """Labels owning at least one pixel on the image border."""
    labels = np.asarray(labels)
    border = np.concatenate(
        [labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]]
    )
    return set(int(v) for v in np.unique(border))


def _grid_centers(height: int, width: int, k: int) -> np.ndarray:
    """Regular grid of ~k initial centers, (n, 2) float (row, col).

    Grid dimensions follow the image aspect ratio; on square ties the extra
    split goes along the width.
    """
    gy = max(1, int(round(np.sqrt(k * height / width))))
    gx = max(1, int(round(k / gy)))
    ys = (np.arange(gy) + 0.5) * height / gy
    xs = (np.arange(gx) + 0.5) * width / gx
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    return np.stack([yy.ravel(), xx.ravel()], axis=1)


def _assign_pixels(
    lab: np.ndarray,
    centers_pos: np.ndarray,
    centers_lab: np.ndarray,
    spacing: float,
    compactness: float,
) -> np.ndarray:
    """One assignment sweep: nearest center within a 2*spacing window.

    Squared SLIC distance d_lab^2 + (compactness/spacing)^2 * d_xy^2,
    strict-less updates in ascending center order so ties keep the lowest
    center index.
    """
    h, w = lab.shape[:2]
    best = np.full((h, w), np.inf)
    labels = np.full((h, w), -1, dtype=np.int32)
    ratio2 = (compactness / spacing) ** 2
    reach = int(np.ceil(2.0 * spacing))
    for k in range(len(centers_pos)):
        cy, cx = centers_pos[k]
        y0, y1 = max(0, int(cy) - reach), min(h, int(cy) + reach + 1)
        x0, x1 = max(0, int(cx) - reach), min(w, int(cx) + reach + 1)
        if y0 >= y1 or x0 >= x1:
            continue
        patch = lab[y0:y1, x0:x1]
        dc2 = ((patch - centers_lab[k]) ** 2).sum(axis=2)
        yy = np.arange(y0, y1, dtype=np.float64) - cy
        xx = np.arange(x0, x1, dtype=np.float64) - cx
        ds2 = yy[:, None] ** 2 + xx[None, :] ** 2
        dist = dc2 + ratio2 * ds2
        window = best[y0:y1, x0:x1]
        mask = dist < window
        window[mask] = dist[mask]
        labels[y0:y1, x0:x1][mask] = k
    if np.any(labels < 0):
        _assign_orphans(lab, centers_pos, centers_lab, ratio2, labels)
    return labels


def _assign_orphans(
    lab: np.ndarray,
    centers_pos: np.ndarray,
    centers_lab: np.ndarray,
    ratio2: float,
    labels: np.ndarray,
) -> None:
    # Fallback for pixels outside every search window (tiny center counts
    # on elongated images); full distance scan, lowest index wins ties.
    ys, xs = np.nonzero(labels < 0)
    pix_lab = lab[ys, xs]
    dc2 = ((pix_lab[:, None, :] - centers_lab[None, :, :]) ** 2).sum(axis=2)
    ds2 = (ys[:, None] - centers_pos[None, :, 0]) ** 2 + (
        xs[:, None] - centers_pos[None, :, 1]
    ) ** 2
    labels[ys, xs] = np.argmin(dc2 + ratio2 * ds2, axis=1).astype(np.int32)


def _label_means(labels: np.ndarray, values: np.ndarray, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact per-label means of (n, d) values via sorted segmented reduction."""
    flat = labels.ravel()
    order = np.argsort(flat, kind="stable")
    sorted_vals = values.reshape(-1, values.shape[-1])[order]
    counts = np.bincount(flat, minlength=count)
    starts = np.zeros(count, dtype=np.intp)
    np.cumsum(counts[:-1], out=starts[1:])
    present = counts > 0
    sums = np.zeros((count, values.shape[-1]), dtype=np.float64)
    sums[present] = np.add.reduceat(sorted_vals, starts[present], axis=0)
    means = np.zeros_like(sums)
    means[present] = sums[present] / counts[present, None]
    return means, counts


def _enforce_connectivity(labels: np.ndarray, k: int, min_fraction: float) -> np.ndarray:
    """Split regions into 4-connected components and merge undersized ones.

    A component smaller than min_fraction * (pixels / k) is folded into its
    largest 4-adjacent component (lowest id on ties).  Final labels are
    renumbered 0..count-1 in row-major order of first occurrence.
    """
    h, w = labels.shape
    comp = np.full((h, w), -1, dtype=np.int32)
    n_comp = 0
    structure = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
    for lbl in range(int(labels.max()) + 1):
        mask = labels == lbl
        if not mask.any():
            continue
        cc, n = ndimage.label(mask, structure=structure)
        comp[mask] = cc[mask] + n_comp - 1
        n_comp += n

    sizes = np.bincount(comp.ravel(), minlength=n_comp).astype(np.int64)
    neighbor_sets = _component_neighbors(comp, n_comp)

    parent = np.arange(n_comp, dtype=np.intp)

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    threshold = min_fraction * (h * w / k)
    for c in range(n_comp):
        root = find(c)
        if sizes[root] >= threshold:
            continue
        candidates = {find(n) for n in neighbor_sets[root]} - {root}
        if not candidates:
            continue
        target = max(sorted(candidates), key=lambda r: sizes[r])
        parent[root] = target
        sizes[target] += sizes[root]
        merged = (neighbor_sets[root] | neighbor_sets[target]) - {root, target}
        neighbor_sets[target] = merged

    roots = np.array([find(c) for c in range(n_comp)], dtype=np.intp)
    merged_grid = roots[comp]
    _, first_idx, inverse = np.unique(
        merged_grid.ravel(), return_index=True, return_inverse=True
    )
    order = np.argsort(first_idx, kind="stable")
    rank = np.empty(len(first_idx), dtype=np.int32)
    rank[order] = np.arange(len(first_idx), dtype=np.int32)
    return rank[inverse].reshape(h, w)


def _component_neighbors(comp: np.ndarray, n_comp: int) -> list[set[int]]:
    vert = np.stack([comp[:-1, :].ravel(), comp[1:, :].ravel()], axis=1)
    horz = np.stack([comp[:, :-1].ravel(), comp[:, 1:].ravel()], axis=1)
    pairs = np.concatenate([vert, horz], axis=0)
    pairs = np.unique(pairs[pairs[:, 0] != pairs[:, 1]], axis=0)
    sets: list[set[int]] = [set() for _ in range(n_comp)]
    for u, v in pairs:
        sets[int(u)].add(int(v))
        sets[int(v)].add(int(u))
    return sets


def segment_slic(image: np.ndarray, params: SlicParams) -> SuperpixelLabeling:
    """Partition an RGB image into superpixels.

    image: (H, W, 3) RGB raster, uint8 or floats in [0, 1].  Deterministic
    for fixed inputs; requires region_count_target <= pixel count.
    """
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3 or image.size == 0:
        raise ValueError(f"expected nonempty (H, W, 3) image, got shape {image.shape}")
    h, w = image.shape[:2]
    k = params.region_count_target
    if k > h * w:
        raise ValueError(f"region_count_target {k} exceeds pixel count {h * w}")

    if image.dtype == np.uint8:
        rgb = image.astype(np.float64) / 255.0
    else:
        rgb = np.clip(image.astype(np.float64), 0.0, 1.0)
    lab = rgb2lab(rgb)

    spacing = float(np.sqrt(h * w / k))
    centers_pos = _grid_centers(h, w, k)
    ys = np.clip(np.round(centers_pos[:, 0]).astype(int), 0, h - 1)
    xs = np.clip(np.round(centers_pos[:, 1]).astype(int), 0, w - 1)
    centers_lab = lab[ys, xs].astype(np.float64)

    n_centers = len(centers_pos)
    coords = np.stack(
        np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij"),
        axis=-1,
    )
    feats = np.concatenate([coords, lab], axis=2)
    labels = None
    for _ in range(params.iterations):
        labels = _assign_pixels(lab, centers_pos, centers_lab, spacing, params.compactness)
        means, counts = _label_means(labels, feats, n_centers)
        live = counts > 0
        centers_pos[live] = means[live, :2]
        centers_lab[live] = means[live, 2:]

    final = _enforce_connectivity(labels, k, params.min_region_fraction)
    return SuperpixelLabeling.from_label_grid(final)


def write_label_png(labeling: SuperpixelLabeling, path) -> None:
    """Debug dump of the label grid as 16-bit single-channel PNG."""
    from PIL import Image

    if labeling.count > 65536:
        raise ValueError("too many labels for 16-bit PNG")
    arr = labeling.labels.astype(np.uint16)
    Image.fromarray(arr).save(path, format="PNG")
