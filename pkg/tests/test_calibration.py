import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rejopt.calibration import (
    TEMPERATURE_GRID,
    CalibrationMap,
    apply_calibration,
    class_nll,
    fit_class_temperature,
    fit_per_class_temperature,
)
from rejopt.scores import ScoreSet, predictions, softmax


def sharp_noisy_set(accuracy, m=400, c=4, scale=6.0, seed=0):
    """Logits that put softmax mass ~0.99 on the prediction while only
    `accuracy` of predictions are right: an overconfident classifier."""
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, c, size=m)
    pred = labels.copy()
    flip = rng.random(m) >= accuracy
    pred[flip] = (labels[flip] + rng.integers(1, c, size=int(flip.sum()))) % c
    logits = np.zeros((m, c))
    logits[np.arange(m), pred] = scale
    ids = tuple(f"e{i}" for i in range(m))
    return ScoreSet(c, ids, labels, logits)


def test_grid_shape():
    assert len(TEMPERATURE_GRID) == 61
    assert TEMPERATURE_GRID[0] == pytest.approx(0.05)
    assert TEMPERATURE_GRID[-1] == pytest.approx(10.0)
    ratios = [TEMPERATURE_GRID[i + 1] / TEMPERATURE_GRID[i] for i in range(60)]
    assert max(ratios) - min(ratios) < 1e-9  # log spaced


def test_class_nll_known_value():
    # Single two-class example with logits (log 3, 0) and true label 0:
    # p(true) = 3/4, nll = -log(3/4).
    logits = np.array([[math.log(3.0), 0.0]])
    labels = np.array([0])
    assert class_nll(logits, labels, 1.0) == pytest.approx(-math.log(0.75), rel=1e-12)
    # At temperature 2 the logit becomes log(3)/2.
    p = math.exp(math.log(3.0) / 2.0)
    assert class_nll(logits, labels, 2.0) == pytest.approx(-math.log(p / (p + 1.0)), rel=1e-12)


def test_overconfident_set_gets_flattened():
    s = sharp_noisy_set(accuracy=0.7)
    cal = fit_per_class_temperature(s)
    for j, stats in enumerate(cal.fit_stats):
        assert stats.count > 0
        assert cal.temperatures[j] > 1.5
        assert stats.nll_after < stats.nll_before


def test_underconfident_set_gets_sharpened():
    s = sharp_noisy_set(accuracy=0.999, scale=0.8, seed=1)
    cal = fit_per_class_temperature(s)
    assert all(t < 1.0 for t in cal.temperatures)


def test_fit_matches_fine_grid_oracle():
    # The NLL in inverse temperature is convex, so coarse grid plus golden
    # refinement must do at least as well as a dense grid scan.
    fine = np.geomspace(0.05, 10.0, 4001)
    for seed, acc in [(0, 0.6), (1, 0.8), (2, 0.95)]:
        s = sharp_noisy_set(accuracy=acc, m=300, seed=seed)
        preds = predictions(s)
        for j in range(s.class_count):
            member = preds == j
            z, y = s.logits[member], s.labels[member]
            t_fit, _, nll_fit = fit_class_temperature(z, y)
            oracle = min(class_nll(z, y, t) for t in fine)
            assert nll_fit <= oracle + 1e-9


def test_never_worse_than_unscaled():
    rng = np.random.default_rng(9)
    for trial in range(20):
        m = rng.integers(3, 60)
        c = rng.integers(2, 5)
        logits = rng.normal(scale=rng.uniform(0.1, 8.0), size=(m, c))
        labels = rng.integers(0, c, size=m)
        t, before, after = fit_class_temperature(logits, labels)
        assert after <= before + 1e-12


def test_flat_nll_keeps_temperature_one():
    # Tied logits and huge-gap correct rows give a temperature-invariant NLL
    # (the gap underflows at every grid temperature); the fit must then fall
    # back to T = 1 rather than report an arbitrary grid point.
    logits = np.array([[0.0, -1e9], [0.0, 0.0], [0.0, 0.0]])
    labels = np.array([0, 0, 1])
    t, before, after = fit_class_temperature(logits, labels)
    assert t == 1.0
    assert after == before


def test_unpredicted_class_keeps_temperature_one():
    # Class 2 never wins the argmax.
    logits = np.array([[3.0, 0.0, -9.0], [0.0, 3.0, -9.0], [2.0, 1.0, -9.0]])
    s = ScoreSet(3, ("a", "b", "c"), np.array([0, 1, 0]), logits)
    cal = fit_per_class_temperature(s)
    assert cal.temperatures[2] == 1.0
    assert cal.fit_stats[2].count == 0
    assert cal.fit_stats[2].nll_before is None


def test_identity_map():
    cal = CalibrationMap.identity(4)
    assert cal.temperatures == (1.0, 1.0, 1.0, 1.0)
    s = sharp_noisy_set(accuracy=0.9, m=50)
    confs = apply_calibration(s, cal)
    expected = [softmax(s.logits[i])[predictions(s)[i]] for i in range(len(s))]
    assert np.allclose(confs, expected, rtol=1e-12)


def test_apply_calibration_class_count_mismatch():
    s = sharp_noisy_set(accuracy=0.9, m=10, c=3)
    with pytest.raises(ValueError):
        apply_calibration(s, CalibrationMap.identity(4))


def test_calibration_rejects_empty():
    s = ScoreSet(2, (), np.zeros(0, dtype=int), np.zeros((0, 2)))
    with pytest.raises(ValueError):
        fit_per_class_temperature(s)


@given(seed=st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_calibration_never_moves_predictions(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(4, 40))
    c = int(rng.integers(2, 6))
    logits = rng.normal(scale=rng.uniform(0.2, 5.0), size=(m, c))
    labels = rng.integers(0, c, size=m)
    s = ScoreSet(c, tuple(f"e{i}" for i in range(m)), labels, logits)
    before = predictions(s)
    cal = fit_per_class_temperature(s)
    # Scaling by per-class positive temperatures cannot change any argmax.
    scaled = s.logits / np.asarray(cal.temperatures)[before][:, None]
    assert (np.argmax(scaled, axis=1) == before).all()
    for j, stats in enumerate(cal.fit_stats):
        if stats.count:
            assert stats.nll_after <= stats.nll_before + 1e-12
