"""Synthetic 2-D classification problems with an analytic score model.

Classes are planar shapes (uniform rectangles or isotropic Gaussians) with
sampling weights.  Weights are realized as per-class sample counts: each
partition's base count is scaled by weight / min(weight), so a 2:1 spec
yields twice as many class-0 points per partition.

Instead of training a model, scores come from the true posterior: for a
point x, logit_j = log(weight_j * density_j(x)), with log(0) floored at a
large negative constant.  Softmax of that row is exactly the weighted
density posterior, so the score model is Bayes-optimal and calibrated by
construction.  Points where every class density vanishes get a uniform
posterior (all-zero logits).

For all-rectangle specs the generator also emits an ideal-reject mask: true
where the top two posteriors tie, which is exactly the overlap of maximal
equal-density regions.  Sampling is deterministic per (seed, partition,
class) through numpy's SeedSequence spawn keys.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .scores import ScoreSet

__all__ = [
    "LOG_DENSITY_FLOOR",
    "POSTERIOR_TIE_TOL",
    "UniformRect",
    "IsotropicGaussian",
    "ClassComponent",
    "SyntheticSpec",
    "SyntheticData",
    "bayes_logits",
    "posteriors",
    "ideal_mask",
    "class_counts",
    "generate",
    "preset",
    "preset_names",
    "PARTITIONS",
]

LOG_DENSITY_FLOOR = -1e9
POSTERIOR_TIE_TOL = 1e-9
PARTITIONS = ("train", "val", "test")


@dataclass(frozen=True)
class UniformRect:
    """Axis-aligned rectangle with uniform density 1/area inside."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self) -> None:
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("rectangle must have positive width and height")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        xs = rng.uniform(self.x_min, self.x_max, size=n)
        ys = rng.uniform(self.y_min, self.y_max, size=n)
        return np.column_stack([xs, ys])

    def log_density(self, points: np.ndarray) -> np.ndarray:
        inside = (
            (points[:, 0] >= self.x_min)
            & (points[:, 0] <= self.x_max)
            & (points[:, 1] >= self.y_min)
            & (points[:, 1] <= self.y_max)
        )
        return np.where(inside, -math.log(self.area), -np.inf)

    def to_dict(self) -> dict:
        return {
            "kind": "uniform_rect",
            "x_min": self.x_min, "x_max": self.x_max,
            "y_min": self.y_min, "y_max": self.y_max,
        }


@dataclass(frozen=True)
class IsotropicGaussian:
    """Circular Gaussian with standard deviation sigma per axis."""

    mean_x: float
    mean_y: float
    sigma: float

    def __post_init__(self) -> None:
        if not self.sigma > 0.0:
            raise ValueError("sigma must be positive")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        offsets = rng.standard_normal(size=(n, 2)) * self.sigma
        return offsets + np.array([self.mean_x, self.mean_y])

    def log_density(self, points: np.ndarray) -> np.ndarray:
        dx = points[:, 0] - self.mean_x
        dy = points[:, 1] - self.mean_y
        r2 = dx * dx + dy * dy
        return -r2 / (2.0 * self.sigma**2) - math.log(2.0 * math.pi * self.sigma**2)

    def to_dict(self) -> dict:
        return {
            "kind": "isotropic_gaussian",
            "mean_x": self.mean_x, "mean_y": self.mean_y, "sigma": self.sigma,
        }


Shape = Union[UniformRect, IsotropicGaussian]


def _shape_from_dict(payload: dict) -> Shape:
    kind = payload.get("kind")
    if kind == "uniform_rect":
        return UniformRect(payload["x_min"], payload["x_max"], payload["y_min"], payload["y_max"])
    if kind == "isotropic_gaussian":
        return IsotropicGaussian(payload["mean_x"], payload["mean_y"], payload["sigma"])
    raise ValueError(f"unknown shape kind {kind!r}")


@dataclass(frozen=True)
class ClassComponent:
    shape: Shape
    weight: float = 1.0

    def __post_init__(self) -> None:
        if not self.weight > 0.0:
            raise ValueError("class weight must be positive")


@dataclass(frozen=True)
class SyntheticSpec:
    """Full description of one synthetic problem.

    per_class_counts gives the base (train, val, test) counts for the
    smallest-weight class; heavier classes scale proportionally.
    """

    name: str
    classes: tuple[ClassComponent, ...]
    per_class_counts: tuple[int, int, int]
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "per_class_counts", tuple(int(c) for c in self.per_class_counts))
        if len(self.classes) < 2:
            raise ValueError("a synthetic spec needs at least two classes")
        if len(self.per_class_counts) != 3:
            raise ValueError("per_class_counts must be (train, val, test)")
        if any(c < 1 for c in self.per_class_counts):
            raise ValueError("per-class counts must be positive")

    @property
    def class_count(self) -> int:
        return len(self.classes)

    @property
    def all_uniform(self) -> bool:
        return all(isinstance(c.shape, UniformRect) for c in self.classes)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "per_class_counts": list(self.per_class_counts),
            "classes": [
                {"weight": c.weight, "shape": c.shape.to_dict()} for c in self.classes
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, payload: dict) -> "SyntheticSpec":
        classes = tuple(
            ClassComponent(shape=_shape_from_dict(c["shape"]), weight=float(c["weight"]))
            for c in payload["classes"]
        )
        return cls(
            name=str(payload.get("name", "custom")),
            classes=classes,
            per_class_counts=tuple(payload["per_class_counts"]),
            seed=int(payload.get("seed", 0)),
        )

    @classmethod
    def from_json(cls, text: str) -> "SyntheticSpec":
        return cls.from_dict(json.loads(text))


def class_counts(spec: SyntheticSpec, partition: str) -> list[int]:
    """Per-class sample counts for one partition: base * weight / min weight."""
    try:
        base = spec.per_class_counts[PARTITIONS.index(partition)]
    except ValueError:
        raise ValueError(f"unknown partition {partition!r}") from None
    w_min = min(c.weight for c in spec.classes)
    return [int(round(base * c.weight / w_min)) for c in spec.classes]


def bayes_logits(points: np.ndarray, spec: SyntheticSpec) -> np.ndarray:
    """Log weighted density per class; softmax of a row is the true posterior."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 2:
        raise ValueError("points must have shape (m, 2)")
    cols = []
    for comp in spec.classes:
        cols.append(math.log(comp.weight) + comp.shape.log_density(points))
    logits = np.column_stack(cols)
    dead = np.isneginf(logits).all(axis=1)
    logits = np.where(np.isneginf(logits), LOG_DENSITY_FLOOR, logits)
    logits[dead] = 0.0
    return logits


def posteriors(points: np.ndarray, spec: SyntheticSpec) -> np.ndarray:
    """Exact class posteriors at each point."""
    z = bayes_logits(points, spec)
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def ideal_mask(points: np.ndarray, spec: SyntheticSpec) -> np.ndarray:
    """True where the decision is inherently ambiguous.

    A point is ideally rejected when the two largest posteriors tie (within
    POSTERIOR_TIE_TOL), i.e. it lies in an overlap of maximal equal weighted
    densities where no classifier can beat coin flipping.
    """
    post = posteriors(points, spec)
    top2 = np.partition(post, -2, axis=1)[:, -2:]
    return (top2[:, 1] - top2[:, 0]) <= POSTERIOR_TIE_TOL


@dataclass(frozen=True)
class SyntheticData:
    """Generated partitions plus ideal-reject masks when defined."""

    spec: SyntheticSpec
    train: ScoreSet
    val: ScoreSet
    test: ScoreSet
    val_mask: np.ndarray | None
    test_mask: np.ndarray | None

    def partition(self, name: str) -> ScoreSet:
        if name not in PARTITIONS:
            raise ValueError(f"unknown partition {name!r}")
        return getattr(self, name)


def _generate_partition(spec: SyntheticSpec, p_index: int) -> ScoreSet:
    partition = PARTITIONS[p_index]
    counts = class_counts(spec, partition)
    point_blocks = []
    label_blocks = []
    for j, comp in enumerate(spec.classes):
        # One independent, reproducible stream per (seed, partition, class).
        rng = np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(p_index, j)))
        point_blocks.append(comp.shape.sample(rng, counts[j]))
        label_blocks.append(np.full(counts[j], j, dtype=np.int64))
    points = np.concatenate(point_blocks, axis=0)
    labels = np.concatenate(label_blocks)
    total = points.shape[0]
    ids = tuple(f"{partition}-{i:06d}" for i in range(total))
    return ScoreSet(
        class_count=spec.class_count,
        ids=ids,
        labels=labels,
        logits=bayes_logits(points, spec),
        coords=points,
    )


def generate(spec: SyntheticSpec) -> SyntheticData:
    """Sample train/val/test score sets (and masks for all-rectangle specs)."""
    train, val, test = (_generate_partition(spec, p) for p in range(3))
    if spec.all_uniform:
        val_mask = ideal_mask(val.coords, spec)
        test_mask = ideal_mask(test.coords, spec)
    else:
        val_mask = test_mask = None
    return SyntheticData(spec, train, val, test, val_mask, test_mask)


def _unit_square(x0: float, y0: float) -> UniformRect:
    return UniformRect(x0, x0 + 1.0, y0, y0 + 1.0)


# Gaussian center spacing per preset, chosen so the base accuracies of the
# presets span roughly the high 60s to high 80s.
_PAIR_SPACING_WIDE = 2.3
_PAIR_SPACING_TIGHT = 0.4
_TRIANGLE_SIDE = 2.3
_SQUARE_SIDE = 2.0


def _preset_components(name: str) -> tuple[ClassComponent, ...]:
    if name == "synthetic1":
        # Two unit squares, one quarter overlap, equal weight.
        return (
            ClassComponent(_unit_square(0.0, 0.0)),
            ClassComponent(_unit_square(0.75, 0.0)),
        )
    if name == "synthetic2":
        # Two unit squares overlapping almost entirely.
        return (
            ClassComponent(_unit_square(0.0, 0.0)),
            ClassComponent(_unit_square(0.1, 0.0)),
        )
    if name == "synthetic3":
        # Three unit squares in a row, each overlapping its neighbor.
        return (
            ClassComponent(_unit_square(0.0, 0.0)),
            ClassComponent(_unit_square(0.75, 0.0)),
            ClassComponent(_unit_square(1.5, 0.0)),
        )
    if name == "synthetic4":
        # Four unit squares on a 2x2 grid with a shared center overlap.
        return (
            ClassComponent(_unit_square(0.0, 0.0)),
            ClassComponent(_unit_square(0.75, 0.0)),
            ClassComponent(_unit_square(0.0, 0.75)),
            ClassComponent(_unit_square(0.75, 0.75)),
        )
    if name == "synthetic5":
        # Two well-separated Gaussians sampled 2:1.
        d = _PAIR_SPACING_WIDE
        return (
            ClassComponent(IsotropicGaussian(0.0, 0.0, 1.0), 2.0),
            ClassComponent(IsotropicGaussian(d, 0.0, 1.0), 1.0),
        )
    if name == "synthetic6":
        # Two heavily overlapping Gaussians sampled 2:1.
        d = _PAIR_SPACING_TIGHT
        return (
            ClassComponent(IsotropicGaussian(0.0, 0.0, 1.0), 2.0),
            ClassComponent(IsotropicGaussian(d, 0.0, 1.0), 1.0),
        )
    if name == "synthetic7":
        # Three Gaussians on an equilateral triangle sampled 4:2:1.
        s = _TRIANGLE_SIDE
        h = s * math.sqrt(3.0) / 2.0
        return (
            ClassComponent(IsotropicGaussian(0.0, 0.0, 1.0), 4.0),
            ClassComponent(IsotropicGaussian(s, 0.0, 1.0), 2.0),
            ClassComponent(IsotropicGaussian(s / 2.0, h, 1.0), 1.0),
        )
    if name == "synthetic8":
        # Four Gaussians on a square sampled 6:5:4:3.
        s = _SQUARE_SIDE
        return (
            ClassComponent(IsotropicGaussian(0.0, 0.0, 1.0), 6.0),
            ClassComponent(IsotropicGaussian(s, 0.0, 1.0), 5.0),
            ClassComponent(IsotropicGaussian(0.0, s, 1.0), 4.0),
            ClassComponent(IsotropicGaussian(s, s, 1.0), 3.0),
        )
    raise ValueError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")


def preset_names() -> list[str]:
    return [f"synthetic{i}" for i in range(1, 9)]


def preset(
    name: str, seed: int = 0, per_class_counts: tuple[int, int, int] = (1000, 1000, 4000)
) -> SyntheticSpec:
    """A named ready-made spec; counts are base per-class (train, val, test)."""
    return SyntheticSpec(
        name=name,
        classes=_preset_components(name),
        per_class_counts=per_class_counts,
        seed=seed,
    )
