"""Model loading and raw-score extraction.

Two backends: joblib pickles of scikit-learn style estimators, and
TorchScript archives (paths ending in .pt/.pth).  Both yield raw scores,
never probabilities: calibration and thresholding happen downstream.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import ExportError


def _two_column(scores: np.ndarray) -> np.ndarray:
    # Binary heads often emit a single margin per row; pad with a zero
    # reference column so downstream softmax reproduces the sigmoid.
    return np.column_stack([np.zeros(len(scores)), scores])


class SklearnModel:
    """Wraps a joblib-loadable estimator exposing one of the usual score APIs."""

    def __init__(self, estimator) -> None:
        self.estimator = estimator

    @property
    def head_width(self) -> int | None:
        classes = getattr(self.estimator, "classes_", None)
        if classes is None:
            return None
        width = len(classes)
        return 2 if width == 2 else width

    def scores(self, batch: np.ndarray) -> np.ndarray:
        est = self.estimator
        if hasattr(est, "decision_function"):
            out = np.asarray(est.decision_function(batch), dtype=np.float64)
            return _two_column(out) if out.ndim == 1 else out
        if hasattr(est, "predict_log_proba"):
            return np.asarray(est.predict_log_proba(batch), dtype=np.float64)
        if hasattr(est, "predict_proba"):
            proba = np.asarray(est.predict_proba(batch), dtype=np.float64)
            return np.log(np.clip(proba, np.finfo(np.float64).tiny, None))
        raise ExportError(
            "model exposes none of decision_function / predict_log_proba / predict_proba"
        )


class TorchScriptModel:
    """Wraps a torch.jit archive; forward(batch) must return per-class scores."""

    def __init__(self, path: str, device: str) -> None:
        try:
            import torch
        except ImportError as exc:
            raise ExportError(".pt/.pth models need torch installed") from exc
        self._torch = torch
        try:
            self.module = torch.jit.load(path, map_location=device)
        except (OSError, RuntimeError, ValueError) as exc:
            raise ExportError(f"cannot load TorchScript model {path}: {exc}") from exc
        self.module.eval()
        self.device = device

    head_width = None  # discovered from the first batch

    def scores(self, batch: np.ndarray) -> np.ndarray:
        torch = self._torch
        with torch.no_grad():
            tensor = torch.as_tensor(batch, dtype=torch.float32, device=self.device)
            out = self.module(tensor).detach().cpu().numpy().astype(np.float64)
        return _two_column(out) if out.ndim == 1 else out


def resolve_model(identifier: str, device: str):
    """Load `identifier` into a scoring backend.

    Paths ending in .pt/.pth go through TorchScript; anything else is
    treated as a joblib pickle.
    """
    if not os.path.exists(identifier):
        raise ExportError(f"model file not found: {identifier}")
    if identifier.endswith((".pt", ".pth")):
        return TorchScriptModel(identifier, device)
    try:
        import joblib
    except ImportError as exc:
        raise ExportError("loading pickled models needs joblib installed") from exc
    try:
        estimator = joblib.load(identifier)
    except Exception as exc:
        raise ExportError(f"cannot unpickle model {identifier}: {exc}") from exc
    return SklearnModel(estimator)
