"""Dataset resolution: named scikit-learn datasets or .npz feature files."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ExportError

SPLITS = ("train", "test", "all")

# Deterministic contiguous split: no shuffling, ever.  Callers who want a
# randomized split should materialize it into an .npz themselves.
TRAIN_FRACTION = 0.75


@dataclass(frozen=True)
class ResolvedDataset:
    """One split of a labeled dataset, ready for batched inference."""

    features: np.ndarray
    labels: np.ndarray
    ids: tuple[str, ...]
    class_count: int


def _split_bounds(total: int, split: str) -> tuple[int, int]:
    if split not in SPLITS:
        raise ExportError(f"unknown split {split!r}; expected one of {SPLITS}")
    cut = int(total * TRAIN_FRACTION)
    if split == "train":
        return 0, cut
    if split == "test":
        return cut, total
    return 0, total


def _validate_labels(labels: np.ndarray, class_count: int) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ExportError(f"labels must be 1-D, got shape {labels.shape}")
    if not np.issubdtype(labels.dtype, np.integer):
        rounded = np.rint(labels)
        if not np.array_equal(rounded, labels):
            raise ExportError("labels must be integers")
        labels = rounded
    labels = labels.astype(np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= class_count):
        raise ExportError(
            f"labels must lie in [0, {class_count}), got range "
            f"[{labels.min()}, {labels.max()}]"
        )
    return labels


def _load_sklearn(name: str) -> tuple[np.ndarray, np.ndarray]:
    try:
        from sklearn import datasets as skd
    except ImportError as exc:
        raise ExportError("sklearn: datasets need scikit-learn installed") from exc
    loader = getattr(skd, f"load_{name}", None)
    if loader is None:
        raise ExportError(f"no bundled scikit-learn dataset named {name!r}")
    bunch = loader()
    return np.asarray(bunch.data, dtype=np.float64), np.asarray(bunch.target)


def _load_npz(path: str) -> tuple[np.ndarray, np.ndarray, list[str] | None, int | None]:
    try:
        archive = np.load(path, allow_pickle=False)
    except OSError as exc:
        raise ExportError(f"cannot read dataset {path}: {exc}") from exc
    if "X" not in archive or "y" not in archive:
        raise ExportError(f"{path} must contain arrays 'X' and 'y'")
    ids = [str(i) for i in archive["ids"]] if "ids" in archive else None
    class_count = int(archive["class_count"]) if "class_count" in archive else None
    return np.asarray(archive["X"], dtype=np.float64), archive["y"], ids, class_count


def resolve_dataset(identifier: str, split: str) -> ResolvedDataset:
    """Load `identifier` and slice out `split`.

    Identifiers are either ``sklearn:<name>`` for the datasets bundled with
    scikit-learn (digits, iris, wine, ...) or a path to an ``.npz`` holding
    ``X`` (m, d), ``y`` (m,), and optionally ``ids`` (m,) and ``class_count``.
    Splits are contiguous: train is the first 75% of rows, test the rest.
    The class count is established from the full dataset before splitting so
    a small split cannot silently hide classes.
    """
    ids = None
    declared = None
    if identifier.startswith("sklearn:"):
        features, labels = _load_sklearn(identifier[len("sklearn:"):])
    else:
        features, labels, ids, declared = _load_npz(identifier)

    if features.ndim != 2:
        raise ExportError(f"features must be 2-D, got shape {features.shape}")
    total = features.shape[0]
    if len(labels) != total:
        raise ExportError(f"{total} feature rows but {len(labels)} labels")

    class_count = declared if declared is not None else int(np.max(labels)) + 1 if total else 0
    labels = _validate_labels(labels, class_count)

    lo, hi = _split_bounds(total, split)
    if hi <= lo:
        raise ExportError(f"split {split!r} of {identifier} is empty")

    if ids is None:
        row_ids = tuple(f"{split}-{i:06d}" for i in range(hi - lo))
    else:
        row_ids = tuple(ids[lo:hi])
        if len(set(row_ids)) != len(row_ids):
            raise ExportError("dataset ids must be unique within the split")

    return ResolvedDataset(
        features=features[lo:hi],
        labels=labels[lo:hi],
        ids=row_ids,
        class_count=class_count,
    )
