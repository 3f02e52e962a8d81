"""Geometry, posterior, and determinism checks for the synthetic generator."""
import math

import numpy as np
import pytest

from rejopt.synthetic import (
    LOG_DENSITY_FLOOR,
    ClassComponent,
    IsotropicGaussian,
    SyntheticSpec,
    UniformRect,
    bayes_logits,
    class_counts,
    generate,
    ideal_mask,
    posteriors,
    preset,
    preset_names,
)


def two_square_spec(offset=0.75, seed=0, counts=(40, 30, 30)):
    return SyntheticSpec(
        name="pair",
        classes=(
            ClassComponent(UniformRect(0.0, 1.0, 0.0, 1.0)),
            ClassComponent(UniformRect(offset, offset + 1.0, 0.0, 1.0)),
        ),
        per_class_counts=counts,
        seed=seed,
    )


def test_rect_log_density_values():
    r = UniformRect(0.0, 2.0, 0.0, 2.0)
    assert r.area == 4.0
    pts = np.array([[1.0, 1.0], [2.0, 2.0], [2.1, 1.0], [-0.001, 1.0]])
    ld = r.log_density(pts)
    # Boundary points count as inside.
    assert ld[0] == ld[1] == pytest.approx(-math.log(4.0))
    assert np.isneginf(ld[2]) and np.isneginf(ld[3])


def test_gaussian_log_density_values():
    g = IsotropicGaussian(0.0, 0.0, 1.0)
    ld = g.log_density(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]]))
    base = -math.log(2.0 * math.pi)
    assert ld[0] == pytest.approx(base)
    assert ld[1] == pytest.approx(base - 0.5)
    assert ld[2] == pytest.approx(base - 2.0)


def test_shape_validation():
    with pytest.raises(ValueError):
        UniformRect(1.0, 1.0, 0.0, 2.0)
    with pytest.raises(ValueError):
        UniformRect(0.0, 1.0, 3.0, 2.0)
    with pytest.raises(ValueError):
        IsotropicGaussian(0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        ClassComponent(UniformRect(0.0, 1.0, 0.0, 1.0), weight=0.0)


def test_spec_validation():
    square = ClassComponent(UniformRect(0.0, 1.0, 0.0, 1.0))
    with pytest.raises(ValueError):
        SyntheticSpec("solo", (square,), (10, 10, 10))
    with pytest.raises(ValueError):
        SyntheticSpec("short", (square, square), (10, 10))
    with pytest.raises(ValueError):
        SyntheticSpec("zero", (square, square), (10, 0, 10))


def test_class_counts_scale_with_weights():
    g = IsotropicGaussian(0.0, 0.0, 1.0)
    spec = SyntheticSpec(
        "ratio",
        (ClassComponent(g, 2.0), ClassComponent(g, 1.0)),
        (1000, 1000, 4000),
    )
    assert class_counts(spec, "train") == [2000, 1000]
    assert class_counts(spec, "test") == [8000, 4000]
    # 6:5:4:3 with base 1000 exercises rounding on the 5/3 ratio.
    spec4 = SyntheticSpec(
        "ratio4",
        tuple(ClassComponent(g, w) for w in (6.0, 5.0, 4.0, 3.0)),
        (1000, 1000, 4000),
    )
    assert class_counts(spec4, "val") == [2000, 1667, 1333, 1000]
    with pytest.raises(ValueError):
        class_counts(spec, "holdout")


def test_bayes_logits_square_pair():
    spec = two_square_spec()
    pts = np.array(
        [
            [0.3, 0.5],   # only class 0 covers it
            [0.9, 0.5],   # overlap, equal densities
            [1.6, 0.5],   # only class 1
            [5.0, 5.0],   # neither: uniform posterior
        ]
    )
    z = bayes_logits(pts, spec)
    assert z[0, 0] == pytest.approx(0.0) and z[0, 1] == LOG_DENSITY_FLOOR
    assert z[1, 0] == z[1, 1] == pytest.approx(0.0)
    assert z[2, 1] == pytest.approx(0.0) and z[2, 0] == LOG_DENSITY_FLOOR
    assert z[3, 0] == z[3, 1] == 0.0
    post = posteriors(pts, spec)
    assert post[0, 0] == pytest.approx(1.0)
    assert post[1, 0] == pytest.approx(0.5)
    assert post[3, 0] == pytest.approx(0.5)
    np.testing.assert_allclose(post.sum(axis=1), 1.0, atol=1e-12)


def test_bayes_logits_weighted_gaussians():
    # At the midpoint densities tie, so the 2:1 weights set the posterior.
    g0 = IsotropicGaussian(0.0, 0.0, 1.0)
    g1 = IsotropicGaussian(2.0, 0.0, 1.0)
    spec = SyntheticSpec(
        "pairg", (ClassComponent(g0, 2.0), ClassComponent(g1, 1.0)), (10, 10, 10)
    )
    post = posteriors(np.array([[1.0, 0.0]]), spec)
    assert post[0, 0] == pytest.approx(2.0 / 3.0)
    assert post[0, 1] == pytest.approx(1.0 / 3.0)


def test_bayes_logits_rejects_bad_shape():
    spec = two_square_spec()
    with pytest.raises(ValueError):
        bayes_logits(np.zeros((4, 3)), spec)


def test_ideal_mask_marks_equal_density_overlap():
    spec = two_square_spec()
    pts = np.array([[0.3, 0.5], [0.9, 0.5], [1.6, 0.5]])
    assert ideal_mask(pts, spec).tolist() == [False, True, False]


def test_ideal_mask_three_class_row():
    # A two-way tie is ideal rejection even when a third class has no density.
    r = 0.75
    spec = SyntheticSpec(
        "row",
        (
            ClassComponent(UniformRect(0.0, 1.0, 0.0, 1.0)),
            ClassComponent(UniformRect(r, r + 1.0, 0.0, 1.0)),
            ClassComponent(UniformRect(2 * r, 2 * r + 1.0, 0.0, 1.0)),
        ),
        (10, 10, 10),
    )
    pts = np.array([[0.9, 0.5], [1.6, 0.5], [0.3, 0.5], [1.2, 0.5]])
    assert ideal_mask(pts, spec).tolist() == [True, True, False, False]


def test_generate_partition_layout():
    spec = two_square_spec(counts=(40, 30, 20))
    data = generate(spec)
    assert [len(data.train.ids), len(data.val.ids), len(data.test.ids)] == [80, 60, 40]
    assert data.train.ids[0] == "train-000000"
    assert data.val.ids[-1] == "val-000059"
    np.testing.assert_array_equal(data.train.labels[:40], 0)
    np.testing.assert_array_equal(data.train.labels[40:], 1)
    assert data.train.coords.shape == (80, 2)
    assert np.isfinite(data.train.logits).all()
    # Sampled points actually lie in their class shape.
    r0 = spec.classes[0].shape
    pts0 = data.train.coords[:40]
    assert (pts0[:, 0] >= r0.x_min).all() and (pts0[:, 0] <= r0.x_max).all()


def test_generate_is_deterministic():
    a = generate(two_square_spec(seed=7))
    b = generate(two_square_spec(seed=7))
    np.testing.assert_array_equal(a.train.coords, b.train.coords)
    np.testing.assert_array_equal(a.test.logits, b.test.logits)
    np.testing.assert_array_equal(a.val_mask, b.val_mask)
    c = generate(two_square_spec(seed=8))
    assert not np.array_equal(a.train.coords, c.train.coords)


def test_generate_partitions_use_distinct_streams():
    data = generate(two_square_spec(seed=3))
    assert not np.array_equal(data.train.coords[:30], data.val.coords[:30])


def test_masks_only_for_all_uniform_specs():
    rect_data = generate(two_square_spec())
    assert rect_data.val_mask is not None and rect_data.test_mask is not None
    assert rect_data.val_mask.dtype == bool
    assert len(rect_data.val_mask) == len(rect_data.val.ids)
    gauss_data = generate(preset("synthetic5", per_class_counts=(20, 15, 15)))
    assert gauss_data.val_mask is None and gauss_data.test_mask is None


def test_mask_matches_overlap_membership():
    # For the quarter-overlap pair the mask is exactly "inside both squares".
    spec = two_square_spec(counts=(50, 120, 40))
    data = generate(spec)
    pts = data.val.coords
    in_both = (pts[:, 0] >= 0.75) & (pts[:, 0] <= 1.0)
    np.testing.assert_array_equal(data.val_mask, in_both)
    assert data.val_mask.any()


def test_spec_json_round_trip():
    spec = preset("synthetic7", seed=5, per_class_counts=(12, 8, 9))
    again = SyntheticSpec.from_json(spec.to_json())
    assert again == spec
    minimal = SyntheticSpec.from_dict(
        {
            "per_class_counts": [5, 5, 5],
            "classes": [
                {"weight": 1.0, "shape": {"kind": "uniform_rect", "x_min": 0, "x_max": 1, "y_min": 0, "y_max": 1}},
                {"weight": 1.0, "shape": {"kind": "uniform_rect", "x_min": 0.5, "x_max": 1.5, "y_min": 0, "y_max": 1}},
            ],
        }
    )
    assert minimal.name == "custom" and minimal.seed == 0
    with pytest.raises(ValueError):
        SyntheticSpec.from_dict(
            {
                "per_class_counts": [5, 5, 5],
                "classes": [{"weight": 1.0, "shape": {"kind": "triangle"}}] * 2,
            }
        )


def test_preset_catalog():
    assert preset_names() == [f"synthetic{i}" for i in range(1, 9)]
    with pytest.raises(ValueError, match="synthetic1"):
        preset("synthetic9")
    for name in preset_names():
        spec = preset(name, per_class_counts=(6, 4, 5))
        data = generate(spec)
        assert data.train.class_count == spec.class_count
        uniform = name in ("synthetic1", "synthetic2", "synthetic3", "synthetic4")
        assert (data.val_mask is not None) == uniform
