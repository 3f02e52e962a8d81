"""Per-class temperature scaling.

Each class gets its own temperature, fit by minimizing the mean negative log
likelihood of the true labels over the validation examples *predicted* as
that class.  Scaling logits by a positive temperature never changes the
argmax, so calibration reshapes confidences without moving any decision
boundary.  The search is a coarse log-spaced grid followed by golden-section
refinement; T = 1 stays in the candidate set, which guarantees the fitted
temperature never fits worse than no scaling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scores import ScoreSet, predictions, scaled_confidences

__all__ = [
    "TEMPERATURE_GRID",
    "ClassFitStats",
    "CalibrationMap",
    "class_nll",
    "fit_class_temperature",
    "fit_per_class_temperature",
    "apply_calibration",
]

# 61 points, log spaced, spanning strong sharpening to strong flattening.
TEMPERATURE_GRID: tuple[float, ...] = tuple(np.geomspace(0.05, 10.0, 61))

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ClassFitStats:
    """Fit summary for one class: member count and NLL before/after scaling."""

    count: int
    nll_before: float | None
    nll_after: float | None


@dataclass(frozen=True)
class CalibrationMap:
    """Fitted per-class temperatures plus per-class fit statistics."""

    temperatures: tuple[float, ...]
    fit_stats: tuple[ClassFitStats, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "temperatures", tuple(float(t) for t in self.temperatures))
        if any(not t > 0.0 for t in self.temperatures):
            raise ValueError("temperatures must be positive")
        if len(self.fit_stats) != len(self.temperatures):
            raise ValueError("need fit stats for every class")

    @classmethod
    def identity(cls, class_count: int) -> "CalibrationMap":
        """No-op calibration: temperature one for every class."""
        if class_count < 1:
            raise ValueError("class_count must be positive")
        return cls(
            temperatures=(1.0,) * class_count,
            fit_stats=tuple(ClassFitStats(0, None, None) for _ in range(class_count)),
        )


def class_nll(logits: np.ndarray, labels: np.ndarray, temperature: float) -> float:
    """Mean negative log likelihood of labels under temperature-scaled softmax."""
    if not temperature > 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    z = np.asarray(logits, dtype=np.float64) / temperature
    if z.ndim != 2 or z.shape[0] == 0:
        raise ValueError("logits must be a non-empty (m, c) matrix")
    zmax = z.max(axis=1)
    lse = zmax + np.log(np.exp(z - zmax[:, None]).sum(axis=1))
    true_logit = z[np.arange(z.shape[0]), labels]
    return float(np.mean(lse - true_logit))


def _golden_min(fn, lo: float, hi: float, iters: int = 60) -> float:
    """Golden-section minimum of fn on [lo, hi]; deterministic, no tolerance games."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(iters):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = fn(x2)
    return x1 if f1 <= f2 else x2


def fit_class_temperature(logits: np.ndarray, labels: np.ndarray) -> tuple[float, float, float]:
    """Fit one temperature; returns (temperature, nll_before, nll_after).

    Evaluates the coarse grid, refines between the neighbors of the grid
    minimum by golden section in log space, and keeps T = 1 whenever nothing
    beats it strictly.
    """
    nll_one = class_nll(logits, labels, 1.0)
    grid_nlls = [class_nll(logits, labels, t) for t in TEMPERATURE_GRID]
    i = int(np.argmin(grid_nlls))
    lo = TEMPERATURE_GRID[max(i - 1, 0)]
    hi = TEMPERATURE_GRID[min(i + 1, len(TEMPERATURE_GRID) - 1)]
    log_t = _golden_min(
        lambda u: class_nll(logits, labels, math.exp(u)), math.log(lo), math.log(hi)
    )
    refined = math.exp(log_t)
    nll_refined = class_nll(logits, labels, refined)

    best_t, best_nll = 1.0, nll_one
    if grid_nlls[i] < best_nll:
        best_t, best_nll = TEMPERATURE_GRID[i], grid_nlls[i]
    if nll_refined < best_nll:
        best_t, best_nll = refined, nll_refined
    return best_t, nll_one, best_nll


def fit_per_class_temperature(val: ScoreSet) -> CalibrationMap:
    """Fit one temperature per class on validation scores.

    Classes that never appear as a prediction keep temperature one.
    """
    if len(val) == 0:
        raise ValueError("cannot calibrate on an empty score set")
    preds = predictions(val)
    temperatures: list[float] = []
    stats: list[ClassFitStats] = []
    for j in range(val.class_count):
        member = preds == j
        count = int(member.sum())
        if count == 0:
            temperatures.append(1.0)
            stats.append(ClassFitStats(0, None, None))
            continue
        t, before, after = fit_class_temperature(val.logits[member], val.labels[member])
        temperatures.append(t)
        stats.append(ClassFitStats(count, before, after))
    return CalibrationMap(temperatures=tuple(temperatures), fit_stats=tuple(stats))


def apply_calibration(scores: ScoreSet, cal: CalibrationMap) -> np.ndarray:
    """Calibrated confidence (max scaled softmax) for every example."""
    if len(cal.temperatures) != scores.class_count:
        raise ValueError(
            f"calibration has {len(cal.temperatures)} classes, scores have {scores.class_count}"
        )
    return scaled_confidences(scores, cal.temperatures)
