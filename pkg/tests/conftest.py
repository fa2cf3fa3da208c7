import numpy as np
import pytest

from smoseg.slic import SuperpixelLabeling


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def grid_labeling(h: int, w: int, rows: int, cols: int) -> SuperpixelLabeling:
    """Regular rows x cols block labeling, labels in row-major block order."""
    ys = np.minimum(np.arange(h) * rows // h, rows - 1)
    xs = np.minimum(np.arange(w) * cols // w, cols - 1)
    labels = ys[:, None] * cols + xs[None, :]
    return SuperpixelLabeling.from_label_grid(labels.astype(np.int32))


def random_labeling(rng: np.random.Generator, h: int, w: int, count: int) -> SuperpixelLabeling:
    """Voronoi-style labeling from random sites: contiguous-ish, gap-free."""
    sites = np.stack(
        [rng.integers(0, h, size=count), rng.integers(0, w, size=count)], axis=1
    )
    yy, xx = np.mgrid[0:h, 0:w]
    d2 = (yy[:, :, None] - sites[:, 0]) ** 2 + (xx[:, :, None] - sites[:, 1]) ** 2
    labels = np.argmin(d2, axis=2)
    # relabel to close any gaps (duplicate sites can shadow each other)
    _, labels = np.unique(labels, return_inverse=True)
    return SuperpixelLabeling.from_label_grid(labels.reshape(h, w).astype(np.int32))
