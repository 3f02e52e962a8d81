"""Score containers, rejection decisions, and the CSV/JSON interchange formats.

A ScoreSet holds raw logits, never probabilities.  The CSV layout is one row
per example::

    id,label,logit_0,...,logit_{c-1}[,x,y]

with an optional trailing coordinate pair for 2-D data.  Threshold vectors
travel as JSON with keys class_count, delta, method, temperatures,
thresholds.  A sibling ``<name>.mask.csv`` file with columns id,ideal_reject
carries ground-truth reject bits for synthetic data.
"""
from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .randomness import ViabilityMethod

__all__ = [
    "ParseError",
    "ScoreSet",
    "ThresholdVector",
    "Decision",
    "softmax",
    "decide",
    "predictions",
    "read_scoreset",
    "write_scoreset",
    "read_thresholds",
    "write_thresholds",
    "read_mask",
    "write_mask",
    "mask_path_for",
    "atomic_write_text",
]


class ParseError(ValueError):
    """A score CSV, mask CSV, or threshold JSON violates its schema."""


def atomic_write_text(path: str, text: str) -> None:
    """Write text to path via a temp file and rename, never a partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ScoreSet:
    """Labeled raw classifier scores, optionally with 2-D coordinates.

    Parameters
    ----------
    class_count : int
        Number of classes c.  Labels must lie in [0, c).
    ids : sequence of str
        Unique example identifiers, one per row.
    labels : array-like of int, shape (m,)
    logits : array-like of float, shape (m, c)
        Raw scores; all entries must be finite.
    coords : array-like of float, shape (m, 2), optional
    """

    class_count: int
    ids: tuple[str, ...]
    labels: np.ndarray
    logits: np.ndarray
    coords: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.class_count < 1:
            raise ValueError(f"class_count must be positive, got {self.class_count}")
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))
        labels = _frozen_array(self.labels, np.int64)
        logits = _frozen_array(self.logits, np.float64)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "logits", logits)
        m = len(self.ids)
        if len(set(self.ids)) != m:
            raise ValueError("example ids must be unique")
        if labels.shape != (m,):
            raise ValueError(f"labels shape {labels.shape} does not match {m} ids")
        if logits.shape != (m, self.class_count):
            raise ValueError(
                f"logits shape {logits.shape} does not match ({m}, {self.class_count})"
            )
        if m and not np.isfinite(logits).all():
            raise ValueError("logits must be finite")
        if m and (labels.min() < 0 or labels.max() >= self.class_count):
            raise ValueError("labels must lie in [0, class_count)")
        if self.coords is not None:
            coords = _frozen_array(self.coords, np.float64)
            object.__setattr__(self, "coords", coords)
            if coords.shape != (m, 2):
                raise ValueError(f"coords shape {coords.shape} does not match ({m}, 2)")
            if m and not np.isfinite(coords).all():
                raise ValueError("coords must be finite")

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class ThresholdVector:
    """Per-class temperatures and rejection thresholds plus their provenance.

    A threshold of zero rejects nothing for that class because rejection is
    confidence <= threshold and softmax confidences are strictly positive.
    """

    class_count: int
    delta: float
    method: ViabilityMethod
    temperatures: tuple[float, ...]
    thresholds: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", ViabilityMethod(self.method))
        object.__setattr__(self, "temperatures", tuple(float(t) for t in self.temperatures))
        object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))
        if self.class_count < 1:
            raise ValueError("class_count must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if len(self.temperatures) != self.class_count:
            raise ValueError("need one temperature per class")
        if len(self.thresholds) != self.class_count:
            raise ValueError("need one threshold per class")
        if any(not t > 0.0 for t in self.temperatures):
            raise ValueError("temperatures must be positive")
        if any(not 0.0 <= t <= 1.0 for t in self.thresholds):
            raise ValueError("thresholds must lie in [0, 1]")


@dataclass(frozen=True)
class Decision:
    """Outcome of applying a threshold vector to one logit row."""

    predicted: int
    confidence: float
    rejected: bool


def softmax(logits, temperature: float = 1.0) -> np.ndarray:
    """Temperature-scaled softmax of a 1-D logit vector.

    Computed with max subtraction so large logits cannot overflow.  Ties in
    the underlying argmax resolve to the lowest class index, and scaling by
    any positive temperature never changes the argmax.
    """
    z = np.asarray(logits, dtype=np.float64)
    if z.ndim != 1 or z.size == 0:
        raise ValueError("logits must be a non-empty 1-D vector")
    if not np.isfinite(z).all():
        raise ValueError("logits must be finite")
    if not temperature > 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    z = z / temperature
    e = np.exp(z - z.max())
    return e / e.sum()


def predictions(scores: ScoreSet) -> np.ndarray:
    """Argmax class per row; ties break to the lowest class index."""
    if len(scores) == 0:
        return np.zeros(0, dtype=np.int64)
    return np.argmax(scores.logits, axis=1)


def scaled_confidences(scores: ScoreSet, temperatures: Sequence[float]) -> np.ndarray:
    """Max softmax probability per row under each row's predicted-class temperature."""
    if len(temperatures) != scores.class_count:
        raise ValueError("need one temperature per class")
    temps = np.asarray(temperatures, dtype=np.float64)
    if not (temps > 0.0).all():
        raise ValueError("temperatures must be positive")
    if len(scores) == 0:
        return np.zeros(0, dtype=np.float64)
    preds = predictions(scores)
    z = scores.logits / temps[preds][:, None]
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    probs = e / e.sum(axis=1, keepdims=True)
    return probs[np.arange(len(scores)), preds]


def decide(logits, tv: ThresholdVector) -> Decision:
    """Predict, compute calibrated confidence, and apply the class threshold.

    Rejection is inclusive: confidence equal to the threshold rejects.
    """
    z = np.asarray(logits, dtype=np.float64)
    if z.shape != (tv.class_count,):
        raise ValueError(
            f"logit vector of length {z.shape} does not match class_count {tv.class_count}"
        )
    predicted = int(np.argmax(z))
    confidence = float(softmax(z, tv.temperatures[predicted])[predicted])
    return Decision(predicted, confidence, confidence <= tv.thresholds[predicted])


def _fmt(x: float) -> str:
    return repr(float(x))


def _logit_columns(c: int) -> list[str]:
    return [f"logit_{j}" for j in range(c)]


def write_scoreset(scores: ScoreSet, path: str) -> None:
    """Write a ScoreSet as CSV.  Floats use shortest round-trip formatting."""
    header = ["id", "label"] + _logit_columns(scores.class_count)
    if scores.coords is not None:
        header += ["x", "y"]
    lines = [",".join(header)]
    for i, ident in enumerate(scores.ids):
        row = [ident, str(int(scores.labels[i]))]
        row += [_fmt(v) for v in scores.logits[i]]
        if scores.coords is not None:
            row += [_fmt(scores.coords[i, 0]), _fmt(scores.coords[i, 1])]
        lines.append(",".join(row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _parse_float(text: str, row: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"row {row}, column {column}: {text!r} is not a number") from None
    if not np.isfinite(value):
        raise ParseError(f"row {row}, column {column}: non-finite value {text!r}")
    return value


def read_scoreset(path: str) -> ScoreSet:
    """Parse a score CSV.  Errors name the offending row and column."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file: missing header") from None
        header = [h.strip() for h in header]
        if header[:2] != ["id", "label"]:
            raise ParseError(f"header must start with id,label, got {header[:2]}")
        rest = header[2:]
        has_coords = rest[-2:] == ["x", "y"]
        logit_cols = rest[:-2] if has_coords else rest
        if not logit_cols or logit_cols != _logit_columns(len(logit_cols)):
            raise ParseError(
                "header must list logit_0..logit_{c-1} columns, optionally followed by x,y"
            )
        c = len(logit_cols)
        ids: list[str] = []
        labels: list[int] = []
        logits: list[list[float]] = []
        coords: list[tuple[float, float]] = []
        seen: set[str] = set()
        for row_num, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"row {row_num}: expected {len(header)} fields, got {len(row)}"
                )
            ident = row[0]
            if ident in seen:
                raise ParseError(f"row {row_num}, column id: duplicate id {ident!r}")
            seen.add(ident)
            try:
                label = int(row[1])
            except ValueError:
                raise ParseError(
                    f"row {row_num}, column label: {row[1]!r} is not an integer"
                ) from None
            if not 0 <= label < c:
                raise ParseError(
                    f"row {row_num}, column label: {label} outside [0, {c})"
                )
            values = [
                _parse_float(row[2 + j], row_num, f"logit_{j}") for j in range(c)
            ]
            ids.append(ident)
            labels.append(label)
            logits.append(values)
            if has_coords:
                coords.append(
                    (_parse_float(row[2 + c], row_num, "x"),
                     _parse_float(row[3 + c], row_num, "y"))
                )
    return ScoreSet(
        class_count=c,
        ids=tuple(ids),
        labels=np.asarray(labels, dtype=np.int64),
        logits=np.asarray(logits, dtype=np.float64).reshape(len(ids), c),
        coords=np.asarray(coords, dtype=np.float64).reshape(len(ids), 2) if has_coords else None,
    )


def write_thresholds(tv: ThresholdVector, path: str) -> None:
    payload = {
        "class_count": tv.class_count,
        "delta": tv.delta,
        "method": tv.method.value,
        "temperatures": list(tv.temperatures),
        "thresholds": list(tv.thresholds),
    }
    atomic_write_text(path, json.dumps(payload, indent=2) + "\n")


def read_thresholds(path: str) -> ThresholdVector:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid threshold JSON: {exc}") from None
    required = {"class_count", "delta", "method", "temperatures", "thresholds"}
    if not isinstance(payload, dict) or not required <= set(payload):
        missing = required - set(payload) if isinstance(payload, dict) else required
        raise ParseError(f"threshold JSON missing keys: {sorted(missing)}")
    try:
        method = ViabilityMethod(payload["method"])
    except ValueError:
        allowed = ", ".join(m.value for m in ViabilityMethod)
        raise ParseError(
            f"unknown method {payload['method']!r}; expected one of {allowed}"
        ) from None
    try:
        return ThresholdVector(
            class_count=int(payload["class_count"]),
            delta=float(payload["delta"]),
            method=method,
            temperatures=tuple(float(t) for t in payload["temperatures"]),
            thresholds=tuple(float(t) for t in payload["thresholds"]),
        )
    except (TypeError, ValueError) as exc:
        raise ParseError(f"invalid threshold JSON: {exc}") from None


def mask_path_for(score_path: str) -> str:
    """Sibling mask filename: data.csv -> data.mask.csv."""
    root, ext = os.path.splitext(score_path)
    return f"{root}.mask{ext or '.csv'}"


def write_mask(ids: Iterable[str], mask, path: str) -> None:
    mask = np.asarray(mask, dtype=bool)
    ids = list(ids)
    if len(ids) != mask.shape[0]:
        raise ValueError("mask length must match ids")
    lines = ["id,ideal_reject"]
    lines += [f"{ident},{int(bit)}" for ident, bit in zip(ids, mask)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_mask(path: str, ids: Sequence[str]) -> np.ndarray:
    """Read an ideal-reject mask and align it to the given id order."""
    table: dict[str, bool] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty mask file") from None
        if [h.strip() for h in header] != ["id", "ideal_reject"]:
            raise ParseError("mask header must be id,ideal_reject")
        for row_num, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != 2:
                raise ParseError(f"row {row_num}: expected 2 fields, got {len(row)}")
            if row[0] in table:
                raise ParseError(f"row {row_num}, column id: duplicate id {row[0]!r}")
            if row[1] not in ("0", "1"):
                raise ParseError(
                    f"row {row_num}, column ideal_reject: {row[1]!r} is not 0 or 1"
                )
            table[row[0]] = row[1] == "1"
    missing = [i for i in ids if i not in table]
    if missing:
        raise ParseError(f"mask is missing ids: {missing[:5]!r}...")
    return np.asarray([table[i] for i in ids], dtype=bool)
