"""Per-class rejection thresholds for any classifier's scores.

The toolkit post-processes a trained classifier: calibrate its logits per
class, then learn the largest per-class confidence thresholds whose reject
regions stay statistically indistinguishable from at-most-random chance.
Nothing here trains or queries a model; everything works from (id, label,
logits) rows.
"""
from .calibration import CalibrationMap, ClassFitStats, fit_per_class_temperature, apply_calibration
from .learner import learn_class_threshold, learn_thresholds
from .metrics import EvalReport, ClassBreakdown, accuracy, compare_runs, evaluate, rejected_mask
from .plotting import scatter_svg
from .randomness import (
    RegionTally,
    ViabilityMethod,
    binom_cdf,
    ci_lower_bound,
    region_viable,
)
from .scores import (
    Decision,
    ParseError,
    ScoreSet,
    ThresholdVector,
    decide,
    predictions,
    read_mask,
    read_scoreset,
    read_thresholds,
    softmax,
    write_mask,
    write_scoreset,
    write_thresholds,
)
from .synthetic import SyntheticData, SyntheticSpec, generate, preset, preset_names

__version__ = "0.1.0"

__all__ = [
    "CalibrationMap",
    "ClassFitStats",
    "fit_per_class_temperature",
    "apply_calibration",
    "learn_class_threshold",
    "learn_thresholds",
    "EvalReport",
    "ClassBreakdown",
    "accuracy",
    "compare_runs",
    "evaluate",
    "rejected_mask",
    "scatter_svg",
    "RegionTally",
    "ViabilityMethod",
    "binom_cdf",
    "ci_lower_bound",
    "region_viable",
    "Decision",
    "ParseError",
    "ScoreSet",
    "ThresholdVector",
    "decide",
    "predictions",
    "read_mask",
    "read_scoreset",
    "read_thresholds",
    "softmax",
    "write_mask",
    "write_scoreset",
    "write_thresholds",
    "SyntheticData",
    "SyntheticSpec",
    "generate",
    "preset",
    "preset_names",
    "__version__",
]
