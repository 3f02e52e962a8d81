"""Selective-prediction metrics and multi-run comparison.

Coverage is the fraction of examples kept; select accuracy is accuracy over
the kept examples and reject accuracy is accuracy over the dropped ones, so
the counts always satisfy

    total * accuracy = selected * select_accuracy + rejected * reject_accuracy.

When a ground-truth reject mask is available, ideal decision agreement (ida)
is the fraction of examples whose reject bit matches the mask.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .randomness import RegionTally, betainc_reg
from .scores import ScoreSet, ThresholdVector, predictions, scaled_confidences

__all__ = [
    "ClassBreakdown",
    "EvalReport",
    "accuracy",
    "rejected_mask",
    "evaluate",
    "compare_runs",
]

# Serialized fractions are rounded to this many decimal places.
_REPORT_DECIMALS = 6


def _round_opt(x: float | None) -> float | None:
    return None if x is None else round(x, _REPORT_DECIMALS)


@dataclass(frozen=True)
class ClassBreakdown:
    """Per-class selective metrics keyed by predicted class."""

    class_index: int
    predicted_count: int
    coverage: float | None
    select_accuracy: float | None
    reject_tally: RegionTally

    def to_dict(self) -> dict:
        return {
            "class_index": self.class_index,
            "predicted_count": self.predicted_count,
            "coverage": _round_opt(self.coverage),
            "select_accuracy": _round_opt(self.select_accuracy),
            "reject_count": self.reject_tally.n,
            "reject_correct": self.reject_tally.k,
        }


@dataclass(frozen=True)
class EvalReport:
    """Whole-set selective metrics plus the per-class breakdown."""

    total: int
    selected: int
    rejected: int
    accuracy: float
    coverage: float
    select_accuracy: float | None
    reject_accuracy: float | None
    ida: float | None
    reject_tally: RegionTally
    per_class: tuple[ClassBreakdown, ...]

    def to_dict(self) -> dict:
        return {
            "counts": {
                "total": self.total,
                "selected": self.selected,
                "rejected": self.rejected,
            },
            "accuracy": _round_opt(self.accuracy),
            "coverage": _round_opt(self.coverage),
            "select_accuracy": _round_opt(self.select_accuracy),
            "reject_accuracy": _round_opt(self.reject_accuracy),
            "ida": _round_opt(self.ida),
            "reject_tally": {"n": self.reject_tally.n, "k": self.reject_tally.k},
            "per_class": [c.to_dict() for c in self.per_class],
        }


def accuracy(scores: ScoreSet) -> float:
    """Plain argmax accuracy with no rejection."""
    if len(scores) == 0:
        raise ValueError("accuracy of an empty score set is undefined")
    return float(np.mean(predictions(scores) == scores.labels))


def rejected_mask(scores: ScoreSet, tv: ThresholdVector) -> np.ndarray:
    """Boolean per-example rejection decisions (confidence <= class threshold)."""
    if tv.class_count != scores.class_count:
        raise ValueError(
            f"threshold vector has {tv.class_count} classes, scores have {scores.class_count}"
        )
    preds = predictions(scores)
    confs = scaled_confidences(scores, tv.temperatures)
    thresholds = np.asarray(tv.thresholds, dtype=np.float64)
    return confs <= thresholds[preds]


def evaluate(scores: ScoreSet, tv: ThresholdVector, ideal_mask=None) -> EvalReport:
    """Apply a threshold vector to a score set and report selective metrics."""
    m = len(scores)
    if m == 0:
        raise ValueError("cannot evaluate an empty score set")
    preds = predictions(scores)
    rejected = rejected_mask(scores, tv)
    correct = preds == scores.labels

    n_rej = int(rejected.sum())
    n_sel = m - n_rej
    k_rej = int(np.count_nonzero(correct & rejected))
    k_sel = int(np.count_nonzero(correct)) - k_rej

    if ideal_mask is not None:
        mask = np.asarray(ideal_mask, dtype=bool)
        if mask.shape != (m,):
            raise ValueError(f"mask shape {mask.shape} does not match {m} examples")
        ida = float(np.mean(rejected == mask))
    else:
        ida = None

    breakdown = []
    for j in range(scores.class_count):
        member = preds == j
        count = int(member.sum())
        rej_j = rejected & member
        n_j = int(rej_j.sum())
        k_j = int(np.count_nonzero(correct & rej_j))
        sel_j = count - n_j
        breakdown.append(
            ClassBreakdown(
                class_index=j,
                predicted_count=count,
                coverage=(sel_j / count) if count else None,
                select_accuracy=(
                    (int(np.count_nonzero(correct & member)) - k_j) / sel_j
                    if sel_j
                    else None
                ),
                reject_tally=RegionTally(n_j, k_j),
            )
        )

    return EvalReport(
        total=m,
        selected=n_sel,
        rejected=n_rej,
        accuracy=float(np.mean(correct)),
        coverage=n_sel / m,
        select_accuracy=(k_sel / n_sel) if n_sel else None,
        reject_accuracy=(k_rej / n_rej) if n_rej else None,
        ida=ida,
        reject_tally=RegionTally(n_rej, k_rej),
        per_class=tuple(breakdown),
    )


def _student_t_cdf(t: float, df: float) -> float:
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * betainc_reg(df / 2.0, 0.5, x)
    return tail if t < 0.0 else 1.0 - tail


def compare_runs(a, b) -> tuple[float, float]:
    """Welch's t-test of two run series; one-sided p for mean(a) < mean(b).

    Returns (t_statistic, p_value).  Small p means the first series' mean is
    credibly below the second's.  Identical constant series give p = 0.5 by
    convention; constant series with different means give p of exactly 0 or 1.
    """
    xa = np.asarray(a, dtype=np.float64)
    xb = np.asarray(b, dtype=np.float64)
    if xa.ndim != 1 or xb.ndim != 1 or xa.size < 2 or xb.size < 2:
        raise ValueError("each series needs at least two runs")
    if not (np.isfinite(xa).all() and np.isfinite(xb).all()):
        raise ValueError("run values must be finite")
    na, nb = xa.size, xb.size
    ma, mb = float(xa.mean()), float(xb.mean())
    va, vb = float(xa.var(ddof=1)), float(xb.var(ddof=1))
    se2 = va / na + vb / nb
    if se2 == 0.0:
        if ma == mb:
            return 0.0, 0.5
        return (-math.inf, 0.0) if ma < mb else (math.inf, 1.0)
    t = (ma - mb) / math.sqrt(se2)
    df = se2 * se2 / (
        (va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1)
    )
    return t, _student_t_cdf(t, df)
