"""Micro-averaged dataset evaluation: PR / F-beta-max, ROC / AUC.

Confusion counts are summed over the whole dataset before any ratio is
formed.  The default sweep uses a fixed grid of 257 thresholds k/256 so
reports are reproducible; every report embeds the grid it used.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

DEFAULT_BETA_SQUARED = 0.3


def default_threshold_grid() -> np.ndarray:
    return np.arange(257, dtype=np.float64) / 256.0


@dataclass(frozen=True)
class EvalPoint:
    threshold: float
    precision: float
    recall: float
    tpr: float
    fpr: float
    f_beta: float


@dataclass
class EvalReport:
    points: list[EvalPoint]
    f_beta_max: float
    auc: float
    beta_squared: float
    thresholds: list[float] = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        return {
            "beta_squared": self.beta_squared,
            "f_beta_max": self.f_beta_max,
            "auc": self.auc,
            "thresholds": self.thresholds,
            "points": [vars(p) for p in self.points],
        }

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["threshold", "precision", "recall", "tpr", "fpr", "f_beta"])
            for p in self.points:
                writer.writerow([p.threshold, p.precision, p.recall, p.tpr, p.fpr, p.f_beta])


def _as_bool_mask(arr: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(arr)
    if arr.dtype != bool:
        uniq = np.unique(arr)
        if not np.all(np.isin(uniq, (0, 1))):
            raise ValueError(f"{what} must be binary")
        arr = arr.astype(bool)
    return arr


def confusion_counts(
    masks: Sequence[np.ndarray], gts: Sequence[np.ndarray]
) -> tuple[int, int, int, int]:
    """Dataset-summed (TP, FP, FN, TN)."""
    if len(masks) != len(gts):
        raise ValueError(f"got {len(masks)} masks but {len(gts)} ground truths")
    tp = fp = fn = tn = 0
    for idx, (mask, gt) in enumerate(zip(masks, gts)):
        mask = _as_bool_mask(getattr(mask, "values", mask), f"mask[{idx}]")
        gt = _as_bool_mask(getattr(gt, "values", gt), f"gt[{idx}]")
        if mask.shape != gt.shape:
            raise ValueError(
                f"pair {idx}: mask shape {mask.shape} != gt shape {gt.shape}"
            )
        tp += int(np.count_nonzero(mask & gt))
        fp += int(np.count_nonzero(mask & ~gt))
        fn += int(np.count_nonzero(~mask & gt))
        tn += int(np.count_nonzero(~mask & ~gt))
    return tp, fp, fn, tn


def f_beta(precision: float, recall: float, beta_squared: float = DEFAULT_BETA_SQUARED) -> float:
    """Weighted harmonic mean of precision and recall; 0 on a zero denominator."""
    if precision < 0 or recall < 0:
        raise ValueError("precision and recall must be nonnegative")
    denom = beta_squared * precision + recall
    if denom == 0:
        return 0.0
    return (1.0 + beta_squared) * precision * recall / denom


def _micro_curve(
    probs: Sequence[np.ndarray],
    gts: Sequence[np.ndarray],
    thresholds: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, int, int]:
    """TP and FP counts per threshold, plus total positives/negatives.

    Per pair, the pixel probabilities inside and outside the ground truth
    are sorted once; a searchsorted then yields, for every threshold at
    once, the count of pixels with value >= threshold.
    """
    tp = np.zeros(len(thresholds), dtype=np.int64)
    fp = np.zeros(len(thresholds), dtype=np.int64)
    total_pos = 0
    total_neg = 0
    for idx, (prob, gt) in enumerate(zip(probs, gts)):
        values = np.asarray(getattr(prob, "values", prob), dtype=np.float64)
        gt = _as_bool_mask(getattr(gt, "values", gt), f"gt[{idx}]")
        if values.shape != gt.shape:
            raise ValueError(
                f"pair {idx}: prob shape {values.shape} != gt shape {gt.shape}"
            )
        pos = np.sort(values[gt])
        neg = np.sort(values[~gt])
        tp += pos.size - np.searchsorted(pos, thresholds, side="left")
        fp += neg.size - np.searchsorted(neg, thresholds, side="left")
        total_pos += pos.size
        total_neg += neg.size
    return tp, fp, total_pos, total_neg


def trapezoid_auc(fprs: Iterable[float], tprs: Iterable[float]) -> float:
    """Trapezoidal area under the ROC points.

    Points are sorted by FPR, duplicates deduplicated keeping the maximum
    TPR, and the corners (0,0) and (1,1) appended.
    """
    pts = sorted(zip(fprs, tprs))
    dedup: dict[float, float] = {}
    for x, y in pts:
        dedup[x] = max(dedup.get(x, 0.0), y)
    xs = [0.0] + sorted(dedup) + [1.0]
    ys = [0.0] + [dedup[x] for x in sorted(dedup)] + [1.0]
    return float(np.trapezoid(ys, xs))


def pr_roc_sweep(
    probs: Sequence[np.ndarray],
    gts: Sequence[np.ndarray],
    thresholds: Sequence[float] | np.ndarray | None = None,
    beta_squared: float = DEFAULT_BETA_SQUARED,
) -> EvalReport:
    """Sweep thresholds over the dataset and build the evaluation report.

    Precision is defined as 1 when no pixel is predicted positive; recall
    (and TPR) as 1 when the ground truth is empty, FPR as 0 when it covers
    everything.
    """
    if thresholds is None:
        thresholds = default_threshold_grid()
    thresholds = np.asarray(thresholds, dtype=np.float64)
    if thresholds.size == 0:
        raise ValueError("threshold list must be nonempty")
    if thresholds.min() < 0.0 or thresholds.max() > 1.0:
        raise ValueError("thresholds must lie in [0, 1]")
    if beta_squared <= 0:
        raise ValueError("beta_squared must be positive")
    if len(probs) != len(gts):
        raise ValueError(f"got {len(probs)} maps but {len(gts)} ground truths")

    tp, fp, total_pos, total_neg = _micro_curve(probs, gts, thresholds)
    points = []
    for t, tp_t, fp_t in zip(thresholds, tp, fp):
        predicted = tp_t + fp_t
        precision = tp_t / predicted if predicted > 0 else 1.0
        recall = tp_t / total_pos if total_pos > 0 else 1.0
        fpr = fp_t / total_neg if total_neg > 0 else 0.0
        points.append(
            EvalPoint(
                threshold=float(t),
                precision=float(precision),
                recall=float(recall),
                tpr=float(recall),
                fpr=float(fpr),
                f_beta=f_beta(precision, recall, beta_squared),
            )
        )
    return EvalReport(
        points=points,
        f_beta_max=max(p.f_beta for p in points),
        auc=trapezoid_auc((p.fpr for p in points), (p.tpr for p in points)),
        beta_squared=beta_squared,
        thresholds=[float(t) for t in thresholds],
    )
