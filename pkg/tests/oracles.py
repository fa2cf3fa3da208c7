"""Brute-force reference implementations used as test oracles.

Everything here is deliberately naive (per-pixel scans, exhaustive
enumeration) and independent of the vectorized production code paths.
"""

from __future__ import annotations

import numpy as np

from smoseg.matching import brute_force_lap


def brute_adjacency(labels: np.ndarray) -> list[set[int]]:
    """Pixel-pair scan over all 4-neighbor pairs."""
    h, w = labels.shape
    count = int(labels.max()) + 1
    adj: list[set[int]] = [set() for _ in range(count)]
    for y in range(h):
        for x in range(w):
            for dy, dx in ((1, 0), (0, 1)):
                ny, nx = y + dy, x + dx
                if ny < h and nx < w and labels[y, x] != labels[ny, nx]:
                    a, b = int(labels[y, x]), int(labels[ny, nx])
                    adj[a].add(b)
                    adj[b].add(a)
    return adj


def brute_boundary(labels: np.ndarray) -> set[int]:
    """Scan of the four border lines."""
    h, w = labels.shape
    out = set()
    for y in range(h):
        for x in range(w):
            if y == 0 or y == h - 1 or x == 0 or x == w - 1:
                out.add(int(labels[y, x]))
    return out


def brute_pool(values: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Per-pixel accumulation of superpixel means in double precision."""
    count = int(labels.max()) + 1
    d = values.shape[2]
    sums = np.zeros((count, d), dtype=np.float64)
    counts = np.zeros(count, dtype=np.int64)
    h, w = labels.shape
    for y in range(h):
        for x in range(w):
            sums[labels[y, x]] += values[y, x]
            counts[labels[y, x]] += 1
    return sums / counts[:, None]


def brute_window_stats(channels: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    """Naive sliding-window mean and std with border clipping."""
    h, w, d = channels.shape
    r = window // 2
    means = np.zeros_like(channels, dtype=np.float64)
    stds = np.zeros_like(channels, dtype=np.float64)
    for y in range(h):
        for x in range(w):
            y0, y1 = max(0, y - r), min(h, y + r + 1)
            x0, x1 = max(0, x - r), min(w, x + r + 1)
            patch = channels[y0:y1, x0:x1].reshape(-1, d)
            means[y, x] = patch.mean(axis=0)
            stds[y, x] = patch.std(axis=0)
    return means, stds


def brute_local_contrast(
    vectors_b: np.ndarray, vectors_a: np.ndarray, boundary_b: set[int]
) -> np.ndarray:
    out = np.zeros(len(vectors_b))
    for j in range(len(vectors_b)):
        if j in boundary_b:
            continue
        out[j] = min(np.linalg.norm(vectors_b[j] - va) for va in vectors_a)
    return out


def brute_neighborhood_contrast(
    vectors_b: np.ndarray,
    vectors_a: np.ndarray,
    adjacency_b: list[set[int]],
    adjacency_a: list[set[int]],
    boundary_b: set[int],
) -> np.ndarray:
    """Direct per-graph enumeration via the brute-force matcher."""
    out = np.zeros(len(vectors_b))
    for j in range(len(vectors_b)):
        if j in boundary_b:
            continue
        side_b = [j] + sorted(adjacency_b[j])
        best = np.inf
        for i in range(len(vectors_a)):
            side_a = [i] + sorted(adjacency_a[i])
            costs = np.array(
                [[np.linalg.norm(vectors_a[u] - vectors_b[v]) for v in side_b] for u in side_a]
            )
            norm = min(len(side_a), len(side_b))
            best = min(best, brute_force_lap(costs).total_cost / norm)
        out[j] = best
    return out


def exhaustive_sweep(
    probs: list[np.ndarray],
    gts: list[np.ndarray],
    beta_squared: float,
    thresholds: np.ndarray | None = None,
) -> tuple[float, float]:
    """(F-beta-max, AUC) over every distinct map value as threshold.

    Counts come from direct per-threshold mask comparisons.  The curve
    convention matches the documented report contract (sorted by FPR,
    duplicates keep the max TPR, (0,0) and (1,1) appended); what this
    oracle exercises independently is the counting path and the threshold
    enumeration.
    """
    if thresholds is None:
        thresholds = np.unique(np.concatenate([p.ravel() for p in probs] + [np.array([0.0, 1.0])]))
    total_pos = sum(int(g.sum()) for g in gts)
    total_neg = sum(int((~g).sum()) for g in gts)
    f_best = 0.0
    best_tpr: dict[float, float] = {}
    for t in thresholds:
        tp = fp = 0
        for p, g in zip(probs, gts):
            mask = p >= t
            tp += int(np.count_nonzero(mask & g))
            fp += int(np.count_nonzero(mask & ~g))
        predicted = tp + fp
        precision = tp / predicted if predicted else 1.0
        recall = tp / total_pos if total_pos else 1.0
        fpr = fp / total_neg if total_neg else 0.0
        denom = beta_squared * precision + recall
        f = (1 + beta_squared) * precision * recall / denom if denom else 0.0
        f_best = max(f_best, f)
        best_tpr[fpr] = max(best_tpr.get(fpr, 0.0), recall)
    xs = [0.0] + sorted(best_tpr) + [1.0]
    ys = [0.0] + [best_tpr[x] for x in sorted(best_tpr)] + [1.0]
    auc = 0.0
    for k in range(1, len(xs)):
        auc += (xs[k] - xs[k - 1]) * (ys[k] + ys[k - 1]) / 2.0
    return f_best, auc
