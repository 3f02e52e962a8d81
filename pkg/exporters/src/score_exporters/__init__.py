"""Dump a pretrained classifier's raw logits over a labeled dataset to CSV.

The output format (``id,label,logit_0,...``) is the interchange schema of
the rejection-threshold toolkit; this package only writes it and shares no
code with the consumer.
"""

from .datasets import ResolvedDataset, resolve_dataset
from .errors import ExportError
from .export import ExportJob, export_logits
from .models import resolve_model

__version__ = "0.1.0"

__all__ = [
    "ExportError",
    "ExportJob",
    "ResolvedDataset",
    "export_logits",
    "resolve_dataset",
    "resolve_model",
    "__version__",
]
