"""Batched inference dumped to the id,label,logit_* interchange CSV.

The output schema is the one the thresholding toolkit ingests:

    id,label,logit_0,...,logit_{c-1}

One row per example in the requested split, labels straight from the
dataset, logits straight from the model.  No softmax, no temperature, no
reordering: the file is a faithful transcript of the model's raw scores.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .datasets import resolve_dataset
from .errors import ExportError
from .models import resolve_model


@dataclass(frozen=True)
class ExportJob:
    """Everything needed to turn (model, dataset split) into a score CSV."""

    model: str
    data: str
    out: str
    split: str = "all"
    batch_size: int = 256
    device: str = "cpu"

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ExportError(f"batch_size must be positive, got {self.batch_size}")


def _check_head(width: int, class_count: int, job: ExportJob) -> None:
    if width != class_count:
        raise ExportError(
            f"class-count mismatch: model {job.model} has a {width}-way head "
            f"but dataset {job.data} has {class_count} classes"
        )


def export_logits(job: ExportJob) -> str:
    """Run the model over the split and write the CSV; returns the output path.

    Batches are processed in dataset order and the file is written through a
    temp file plus rename, so a crash never leaves a partial CSV and
    re-running the same job reproduces the output byte for byte.
    """
    dataset = resolve_dataset(job.data, job.split)
    model = resolve_model(job.model, job.device)

    declared = model.head_width
    if declared is not None:
        _check_head(declared, dataset.class_count, job)

    rows = len(dataset.ids)
    chunks: list[np.ndarray] = []
    width = None
    for start in range(0, rows, job.batch_size):
        batch = dataset.features[start : start + job.batch_size]
        scores = np.asarray(model.scores(batch), dtype=np.float64)
        if scores.shape[0] != batch.shape[0]:
            raise ExportError(
                f"model returned {scores.shape[0]} score rows for a "
                f"{batch.shape[0]}-row batch"
            )
        if width is None:
            width = scores.shape[1]
            _check_head(width, dataset.class_count, job)
        elif scores.shape[1] != width:
            raise ExportError("model changed head width between batches")
        if not np.isfinite(scores).all():
            raise ExportError(f"model produced non-finite scores near row {start}")
        chunks.append(scores)

    logits = np.concatenate(chunks, axis=0)

    header = "id,label," + ",".join(f"logit_{c}" for c in range(width))
    lines = [header]
    for i in range(rows):
        cells = [dataset.ids[i], str(int(dataset.labels[i]))]
        cells.extend(repr(float(v)) for v in logits[i])
        lines.append(",".join(cells))

    out_dir = os.path.dirname(os.path.abspath(job.out)) or "."
    os.makedirs(out_dir, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=out_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp_path, job.out)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
    return job.out
