"""Per-pixel feature fields and per-superpixel mean pooling.

Fields either come from FMAP files (externally exported activations of a
convolutional network, upscaled here to the working resolution) or from the
zero-dependency builtin backend, which stacks CIELAB values with window-local
channel means and standard deviations.

FMAP is this project's binary field format: magic ``FMAP``, u32 version (1),
u32 H, W, D, then H*W*D little-endian float32 values, row-major with the
channel index fastest (offset of value (y, x, d) is ``(y*W + x)*D + d``).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from skimage.color import rgb2lab

from .slic import SuperpixelLabeling

FMAP_MAGIC = b"FMAP"
FMAP_VERSION = 1
_HEADER = struct.Struct("<4s4I")


@dataclass
class FeatureField:
    """Dense H x W x D real-valued grid, finite everywhere."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        if values.ndim != 3 or values.size == 0:
            raise ValueError(f"feature field must be nonempty 3-D, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("feature field contains non-finite values")
        self.values = values

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def depth(self) -> int:
        return self.values.shape[2]


@dataclass
class SuperpixelFeatureSet:
    """One pooled D-vector per superpixel of a labeling."""

    vectors: np.ndarray
    source_labeling: SuperpixelLabeling

    def __post_init__(self) -> None:
        if self.vectors.ndim != 2:
            raise ValueError("vectors must be (count, depth)")
        if self.vectors.shape[0] != self.source_labeling.count:
            raise ValueError("one vector per label required")
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("pooled vectors contain non-finite values")

    @property
    def depth(self) -> int:
        return self.vectors.shape[1]


def load_feature_field(path: str | Path) -> FeatureField:
    """Read an FMAP file; values are bit-exact with the payload."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated FMAP header")
    magic, version, h, w, d = _HEADER.unpack_from(raw)
    if magic != FMAP_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != FMAP_VERSION:
        raise ValueError(f"{path}: unsupported FMAP version {version}")
    if h == 0 or w == 0 or d == 0:
        raise ValueError(f"{path}: zero dimension in header ({h}x{w}x{d})")
    expected = _HEADER.size + h * w * d * 4
    if len(raw) != expected:
        raise ValueError(f"{path}: payload size {len(raw)} != expected {expected}")
    values = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(h, w, d)
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{path}: non-finite values in payload")
    return FeatureField(values=values.copy())


def save_feature_field(field: FeatureField, path: str | Path) -> None:
    """Write an FMAP file (float32 payload; load round-trips bit-exactly)."""
    path = Path(path)
    h, w, d = field.values.shape
    header = _HEADER.pack(FMAP_MAGIC, FMAP_VERSION, h, w, d)
    payload = np.ascontiguousarray(field.values, dtype="<f4").tobytes()
    path.write_bytes(header + payload)


def _axis_weights(n_in: int, factor: int) -> np.ndarray:
    """(n_in*factor, n_in) bilinear weight matrix, half-pixel-center convention.

    Output sample i reads input coordinate (i + 0.5)/factor - 0.5, clamped at
    the edges; each row holds the two interpolation weights (summing to 1).
    """
    n_out = n_in * factor
    src = (np.arange(n_out, dtype=np.float64) + 0.5) / factor - 0.5
    lo = np.clip(np.floor(src).astype(np.intp), 0, n_in - 1)
    hi = np.minimum(lo + 1, n_in - 1)
    frac = src - np.floor(src)
    frac[src < 0] = 0.0          # clamp below the first sample center
    frac[hi == lo] = 0.0         # clamp beyond the last sample center
    weights = np.zeros((n_out, n_in), dtype=np.float64)
    rows = np.arange(n_out)
    weights[rows, lo] += 1.0 - frac
    weights[rows, hi] += frac
    return weights


def upscale_field(field: FeatureField, factor: int) -> FeatureField:
    """Channelwise bilinear upscaling by an integer factor (1 = identity)."""
    if factor < 1:
        raise ValueError("upscale factor must be >= 1")
    if factor == 1:
        return FeatureField(values=field.values.copy())
    h, w, _ = field.values.shape
    wy = _axis_weights(h, factor)
    wx = _axis_weights(w, factor)
    vals = field.values.astype(np.float64, copy=False)
    tmp = np.tensordot(wy, vals, axes=(1, 0))          # (H*f, W, D)
    out = np.tensordot(wx, tmp, axes=(1, 1))           # (W*f, H*f, D)
    out = np.swapaxes(out, 0, 1)
    return FeatureField(values=out.astype(field.values.dtype, copy=False))


def pool_superpixel_features(
    field: FeatureField, labeling: SuperpixelLabeling
) -> SuperpixelFeatureSet:
    """Mean feature vector per superpixel, accumulated in double precision."""
    h, w, d = field.values.shape
    if (h, w) != labeling.labels.shape:
        raise ValueError(
            f"field spatial dims {(h, w)} != labeling dims {labeling.labels.shape}"
        )
    flat_labels = labeling.labels.ravel()
    order = np.argsort(flat_labels, kind="stable")
    sorted_vals = field.values.reshape(-1, d).astype(np.float64, copy=False)[order]
    counts = labeling.pixel_counts
    starts = np.zeros(labeling.count, dtype=np.intp)
    np.cumsum(counts[:-1], out=starts[1:])
    sums = np.add.reduceat(sorted_vals, starts, axis=0)
    vectors = sums / counts[:, None]
    return SuperpixelFeatureSet(vectors=vectors, source_labeling=labeling)


def _window_sums(channel: np.ndarray, radius: int) -> tuple[np.ndarray, np.ndarray]:
    """Clipped-window box sums and element counts via an integral image."""
    h, w = channel.shape
    integral = np.zeros((h + 1, w + 1), dtype=np.float64)
    np.cumsum(np.cumsum(channel, axis=0), axis=1, out=integral[1:, 1:])
    ys = np.arange(h)
    xs = np.arange(w)
    y0 = np.clip(ys - radius, 0, h)
    y1 = np.clip(ys + radius + 1, 0, h)
    x0 = np.clip(xs - radius, 0, w)
    x1 = np.clip(xs + radius + 1, 0, w)
    sums = (
        integral[np.ix_(y1, x1)]
        - integral[np.ix_(y0, x1)]
        - integral[np.ix_(y1, x0)]
        + integral[np.ix_(y0, x0)]
    )
    counts = (y1 - y0)[:, None] * (x1 - x0)[None, :]
    return sums, counts.astype(np.float64)


def builtin_feature_field(image: np.ndarray, window: int = 9) -> FeatureField:
    """Classical 9-channel backend: CIELAB plus window-local mean and std.

    Windows are clipped at the image border (statistics over the valid
    pixels only).  window must be odd; window=1 degenerates to mean=value,
    std=0.
    """
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3 or image.size == 0:
        raise ValueError(f"expected nonempty (H, W, 3) image, got shape {image.shape}")
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be an odd positive integer, got {window}")

    if image.dtype == np.uint8:
        rgb = image.astype(np.float64) / 255.0
    else:
        rgb = np.clip(image.astype(np.float64), 0.0, 1.0)
    lab = rgb2lab(rgb)

    if window == 1:
        zeros = np.zeros_like(lab)
        return FeatureField(values=np.concatenate([lab, lab, zeros], axis=2))

    radius = window // 2
    means = np.empty_like(lab)
    stds = np.empty_like(lab)
    for c in range(3):
        channel = lab[:, :, c]
        shift = channel.mean()          # conditioning: center before squaring
        centered = channel - shift
        s1, n = _window_sums(centered, radius)
        s2, _ = _window_sums(centered * centered, radius)
        mean_centered = s1 / n
        means[:, :, c] = mean_centered + shift
        var = np.maximum(s2 / n - mean_centered**2, 0.0)
        stds[:, :, c] = np.sqrt(var)
    return FeatureField(values=np.concatenate([lab, means, stds], axis=2))
