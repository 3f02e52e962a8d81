"""Per-class rejection threshold search.

For each predicted class the candidate thresholds are zero plus the
calibrated confidences of that class's *incorrect* predictions.  A candidate
rejects every slice member with confidence less than or equal to it.  The
candidate is admissible when the rejected tally passes the chance test and at
least one member stays selected; among admissible candidates the one with the
greatest select accuracy wins, with exact ties going to the smallest
threshold.  Classes are searched independently, so the whole vector is the
per-class argmax.

Select accuracies are compared as integer ratios (cross multiplication), so
tie-breaking is exact rather than float-sensitive.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calibration import CalibrationMap, apply_calibration
from .randomness import RegionTally, ViabilityMethod, region_viable
from .scores import ScoreSet, ThresholdVector, predictions

__all__ = [
    "ClassSlice",
    "CandidateEval",
    "candidate_thresholds",
    "evaluate_candidate",
    "learn_class_threshold",
    "learn_thresholds",
]


@dataclass(frozen=True)
class ClassSlice:
    """All validation examples predicted as one class, sorted by confidence.

    confidences ascend; correct is aligned with them.
    """

    class_index: int
    confidences: np.ndarray
    correct: np.ndarray

    def __post_init__(self) -> None:
        conf = np.asarray(self.confidences, dtype=np.float64)
        corr = np.asarray(self.correct, dtype=bool)
        if conf.ndim != 1 or corr.shape != conf.shape:
            raise ValueError("confidences and correct must be aligned 1-D arrays")
        if conf.size and (np.any(np.diff(conf) < 0)):
            raise ValueError("confidences must be sorted ascending")
        if conf.size and (conf.min() < 0.0 or conf.max() > 1.0):
            raise ValueError("confidences must lie in [0, 1]")
        conf.setflags(write=False)
        corr.setflags(write=False)
        object.__setattr__(self, "confidences", conf)
        object.__setattr__(self, "correct", corr)

    @classmethod
    def from_members(cls, class_index: int, confidences, correct) -> "ClassSlice":
        conf = np.asarray(confidences, dtype=np.float64)
        corr = np.asarray(correct, dtype=bool)
        order = np.argsort(conf, kind="stable")
        return cls(class_index, conf[order], corr[order])

    def __len__(self) -> int:
        return int(self.confidences.size)


def candidate_thresholds(cs: ClassSlice) -> list[float]:
    """Ascending candidate list: zero plus each distinct incorrect confidence."""
    wrong = cs.confidences[~cs.correct]
    return sorted({0.0} | {float(v) for v in wrong})


@dataclass(frozen=True)
class CandidateEval:
    """One candidate threshold's reject tally and resulting quality.

    select_accuracy is None when the candidate would reject the entire slice;
    such candidates are never chosen.
    """

    threshold: float
    tally: RegionTally
    viable: bool
    select_accuracy: float | None
    coverage: float


def _tally_at(cs: ClassSlice, threshold: float) -> tuple[int, int]:
    # Rejection is inclusive, so count members with confidence <= threshold.
    n = int(np.searchsorted(cs.confidences, threshold, side="right"))
    k = int(np.count_nonzero(cs.correct[:n]))
    return n, k


def evaluate_candidate(
    cs: ClassSlice, threshold: float, delta: float, method: ViabilityMethod
) -> CandidateEval:
    """Tally, viability, and select accuracy for one candidate threshold."""
    m = len(cs)
    if m == 0:
        raise ValueError("cannot evaluate a candidate on an empty slice")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    n, k = _tally_at(cs, threshold)
    tally = RegionTally(n, k)
    viable = region_viable(tally, delta, method)
    selected = m - n
    total_correct = int(np.count_nonzero(cs.correct))
    if selected == 0:
        sa = None
    else:
        sa = (total_correct - k) / selected
    return CandidateEval(
        threshold=float(threshold),
        tally=tally,
        viable=viable,
        select_accuracy=sa,
        coverage=selected / m,
    )


def learn_class_threshold(cs: ClassSlice, delta: float, method: ViabilityMethod) -> float:
    """Best admissible threshold for one class slice.

    Empty slices learn zero (reject nothing).  Zero is always admissible for
    a non-empty slice, so a threshold always exists.
    """
    method = ViabilityMethod(method)
    m = len(cs)
    if m == 0:
        return 0.0
    total_correct = int(np.count_nonzero(cs.correct))
    best_t = None
    best_num = -1  # selected-correct count of the best candidate
    best_den = 0  # selected count of the best candidate
    for t in candidate_thresholds(cs):
        n, k = _tally_at(cs, t)
        if n == m:
            continue  # rejecting the whole class is never allowed
        if not region_viable(RegionTally(n, k), delta, method):
            continue
        num = total_correct - k
        den = m - n
        # Strictly greater select accuracy replaces; ties keep the smaller
        # threshold because candidates arrive in ascending order.
        if best_t is None or num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    assert best_t is not None
    return float(best_t)


def learn_thresholds(
    val: ScoreSet, cal: CalibrationMap, delta: float, method: ViabilityMethod
) -> ThresholdVector:
    """Learn the full per-class threshold vector from validation scores."""
    method = ViabilityMethod(method)
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if len(val) == 0:
        raise ValueError("cannot learn thresholds from an empty score set")
    if len(cal.temperatures) != val.class_count:
        raise ValueError("calibration class count does not match the score set")
    confs = apply_calibration(val, cal)
    preds = predictions(val)
    correct = preds == val.labels
    thresholds = []
    for j in range(val.class_count):
        member = preds == j
        cs = ClassSlice.from_members(j, confs[member], correct[member])
        thresholds.append(learn_class_threshold(cs, delta, method))
    return ThresholdVector(
        class_count=val.class_count,
        delta=delta,
        method=method,
        temperatures=cal.temperatures,
        thresholds=tuple(thresholds),
    )
