"""Contrast maps for a before/after image pair.

For every superpixel of the before image two nonnegative scores are
computed against the after image: the local score (minimum feature distance
to any after-superpixel) and the neighborhood score (minimum normalized
cost of optimally matching the superpixel-plus-neighbors against any
after-superpixel-plus-neighbors on a complete bipartite graph).  Border
superpixels are forced to zero, the two per-pixel maps are summed and the
sum normalized by its maximum.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial.distance import cdist

from .features import SuperpixelFeatureSet
from .matching import solve_lap_cost
from .slic import SuperpixelLabeling

LapCostFn = Callable[[np.ndarray], float]


@dataclass
class NeighborhoodGraph:
    """Complete bipartite graph between two superpixel neighborhoods.

    side_a / side_b list the anchor label first, then its neighbors in
    ascending order; weights[u, v] is the Euclidean feature distance.
    """

    side_a: list[int]
    side_b: list[int]
    weights: np.ndarray
    cardinality_norm: int

    def __post_init__(self) -> None:
        if self.weights.shape != (len(self.side_a), len(self.side_b)):
            raise ValueError("weight matrix shape does not match the two sides")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("graph weights contain non-finite values")


@dataclass
class ContrastVectors:
    """Per-superpixel local and neighborhood scores (0 on border labels)."""

    local: np.ndarray
    neigh: np.ndarray

    def __post_init__(self) -> None:
        for name, vec in (("local", self.local), ("neigh", self.neigh)):
            if not np.all(np.isfinite(vec)) or np.any(vec < 0):
                raise ValueError(f"{name} scores must be finite and nonnegative")
        if self.local.shape != self.neigh.shape:
            raise ValueError("local and neighborhood score vectors differ in length")


@dataclass
class ContrastMap:
    """Per-pixel contrast in [0, 1] plus its two unnormalized components."""

    values: np.ndarray
    local_component: np.ndarray = field(repr=False)
    neigh_component: np.ndarray = field(repr=False)


def _check_dims(feats_b: SuperpixelFeatureSet, feats_a: SuperpixelFeatureSet) -> None:
    if feats_b.depth != feats_a.depth:
        raise ValueError(
            f"feature dimensionality mismatch: {feats_b.depth} != {feats_a.depth}"
        )
    if feats_a.vectors.shape[0] == 0:
        raise ValueError("after image has no superpixels")


def cross_distances(feats_a: SuperpixelFeatureSet, feats_b: SuperpixelFeatureSet) -> np.ndarray:
    """(count_a, count_b) Euclidean distances between pooled vectors."""
    _check_dims(feats_b, feats_a)
    return cdist(feats_a.vectors, feats_b.vectors, metric="euclidean")


def local_contrast(
    feats_b: SuperpixelFeatureSet,
    feats_a: SuperpixelFeatureSet,
    boundary_b: set[int],
    distances: np.ndarray | None = None,
) -> np.ndarray:
    """Minimum feature distance from each before-superpixel to the after image.

    Border superpixels get exactly 0.
    """
    if distances is None:
        distances = cross_distances(feats_a, feats_b)
    local = distances.min(axis=0)
    if boundary_b:
        local[sorted(boundary_b)] = 0.0
    return local


def neighborhood_sides(label: int, adjacency: list[set[int]]) -> list[int]:
    """Anchor label followed by its neighbors in ascending order."""
    return [label] + sorted(adjacency[label])


def build_neighborhood_graph(
    a_label: int,
    b_label: int,
    feats_a: SuperpixelFeatureSet,
    feats_b: SuperpixelFeatureSet,
    adjacency_a: list[set[int]],
    adjacency_b: list[set[int]],
) -> NeighborhoodGraph:
    """Complete bipartite graph over the two superpixels' neighborhoods."""
    _check_dims(feats_b, feats_a)
    if not 0 <= a_label < len(adjacency_a):
        raise ValueError(f"unknown after-image label {a_label}")
    if not 0 <= b_label < len(adjacency_b):
        raise ValueError(f"unknown before-image label {b_label}")
    side_a = neighborhood_sides(a_label, adjacency_a)
    side_b = neighborhood_sides(b_label, adjacency_b)
    weights = cdist(
        feats_a.vectors[side_a], feats_b.vectors[side_b], metric="euclidean"
    )
    return NeighborhoodGraph(
        side_a=side_a,
        side_b=side_b,
        weights=weights,
        cardinality_norm=min(len(side_a), len(side_b)),
    )


def _neigh_scores_for_labels(
    b_labels: np.ndarray,
    distances: np.ndarray,
    sides_a: list[np.ndarray],
    sides_b: list[np.ndarray],
    lap_cost: LapCostFn,
) -> np.ndarray:
    out = np.empty(len(b_labels), dtype=np.float64)
    for pos, j in enumerate(b_labels):
        sb = sides_b[j]
        cols = distances[:, sb]
        best = np.inf
        for sa in sides_a:
            sub = cols[sa, :]
            norm = min(len(sa), len(sb))
            cost = lap_cost(sub) / norm
            if cost < best:
                best = cost
        out[pos] = best
    return out


def _neigh_worker(args) -> tuple[int, np.ndarray]:
    chunk_id, b_labels, distances, sides_a, sides_b = args
    return chunk_id, _neigh_scores_for_labels(
        b_labels, distances, sides_a, sides_b, solve_lap_cost
    )


def neighborhood_contrast(
    feats_b: SuperpixelFeatureSet,
    feats_a: SuperpixelFeatureSet,
    adjacency_b: list[set[int]],
    adjacency_a: list[set[int]],
    boundary_b: set[int],
    distances: np.ndarray | None = None,
    lap_cost: LapCostFn = solve_lap_cost,
    jobs: int = 1,
) -> np.ndarray:
    """Neighborhood score per before-superpixel (0 on border labels).

    For each non-border superpixel: the minimum over all after-superpixels
    of the optimal-matching cost of their neighborhood graph, divided by the
    smaller neighborhood cardinality.  ``lap_cost`` may be swapped for the
    brute-force oracle; ``jobs`` > 1 splits the before-superpixels across a
    process pool (order-independent exact min reduction).
    """
    _check_dims(feats_b, feats_a)
    if distances is None:
        distances = cross_distances(feats_a, feats_b)
    count_b = feats_b.vectors.shape[0]
    sides_a = [np.asarray(neighborhood_sides(i, adjacency_a)) for i in range(len(adjacency_a))]
    sides_b = [np.asarray(neighborhood_sides(j, adjacency_b)) for j in range(len(adjacency_b))]

    neigh = np.zeros(count_b, dtype=np.float64)
    active = np.array(sorted(set(range(count_b)) - boundary_b), dtype=np.intp)
    if active.size == 0:
        return neigh

    if jobs <= 1 or lap_cost is not solve_lap_cost:
        neigh[active] = _neigh_scores_for_labels(
            active, distances, sides_a, sides_b, lap_cost
        )
        return neigh

    jobs = min(jobs, active.size)
    chunks = np.array_split(active, jobs)
    tasks = [
        (idx, chunk, distances, sides_a, sides_b)
        for idx, chunk in enumerate(chunks)
        if chunk.size
    ]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for chunk_id, scores in pool.map(_neigh_worker, tasks):
            neigh[chunks[chunk_id]] = scores
    return neigh


def combine_contrast(
    local: np.ndarray,
    neigh: np.ndarray,
    labeling_b: SuperpixelLabeling,
) -> ContrastMap:
    """Broadcast scores to pixels, sum, and normalize by the map maximum.

    An identically zero sum is returned as zeros (the normalization is
    undefined there and zero is its continuous limit).
    """
    local = np.asarray(local, dtype=np.float64)
    neigh = np.asarray(neigh, dtype=np.float64)
    if local.shape != (labeling_b.count,) or neigh.shape != (labeling_b.count,):
        raise ValueError(
            f"score vectors must have length {labeling_b.count}, "
            f"got {local.shape} and {neigh.shape}"
        )
    local_map = local[labeling_b.labels]
    neigh_map = neigh[labeling_b.labels]
    summed = local_map + neigh_map
    peak = summed.max()
    values = summed / peak if peak > 0 else np.zeros_like(summed)
    return ContrastMap(values=values, local_component=local_map, neigh_component=neigh_map)


def contrast_map(
    labeling_b: SuperpixelLabeling,
    labeling_a: SuperpixelLabeling,
    feats_b: SuperpixelFeatureSet,
    feats_a: SuperpixelFeatureSet,
    lap_cost: LapCostFn = solve_lap_cost,
    jobs: int = 1,
) -> ContrastMap:
    """Full contrast computation for one before/after pair."""
    distances = cross_distances(feats_a, feats_b)
    scores = ContrastVectors(
        local=local_contrast(feats_b, feats_a, labeling_b.boundary_set, distances=distances),
        neigh=neighborhood_contrast(
            feats_b,
            feats_a,
            labeling_b.adjacency,
            labeling_a.adjacency,
            labeling_b.boundary_set,
            distances=distances,
            lap_cost=lap_cost,
            jobs=jobs,
        ),
    )
    return combine_contrast(scores.local, scores.neigh, labeling_b)


def default_jobs() -> int:
    return max(1, os.cpu_count() or 1)
