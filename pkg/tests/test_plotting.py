import numpy as np
import pytest

from rejopt.plotting import CLASS_COLORS, scatter_svg
from rejopt.scores import ScoreSet


def small_set(coords):
    m = len(coords)
    logits = np.column_stack([np.linspace(1, 2, m), np.zeros(m)])
    return ScoreSet(
        class_count=2,
        ids=tuple(f"p{i}" for i in range(m)),
        labels=np.zeros(m, dtype=np.int64),
        logits=logits,
        coords=np.asarray(coords, dtype=np.float64),
    )


def test_scatter_counts_and_colors():
    ss = small_set([[0.0, 0.0], [1.0, 0.5], [2.0, 1.0], [0.5, 0.25]])
    svg = scatter_svg(ss, [False, True, False, True])
    assert svg.count("<circle") == 4
    assert svg.count('fill="#000000"') == 2
    assert svg.count(f'fill="{CLASS_COLORS[0]}"') == 2
    # Deterministic output.
    assert svg == scatter_svg(ss, [False, True, False, True])


def test_scatter_outlines_and_degenerate_axis():
    ss = small_set([[0.0, 3.0], [1.0, 3.0], [2.0, 3.0]])
    svg = scatter_svg(ss, [False] * 3, outlines=[(0.0, 1.0, 2.5, 3.5)])
    # Background frame plus one outline box.
    assert svg.count("<rect") == 2
    assert 'stroke="#999999"' in svg


def test_scatter_requires_coords_and_matching_mask():
    bare = ScoreSet(
        class_count=2,
        ids=("a",),
        labels=np.array([0]),
        logits=np.array([[1.0, 0.0]]),
    )
    with pytest.raises(ValueError):
        scatter_svg(bare, [False])
    ss = small_set([[0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(ValueError):
        scatter_svg(ss, [False])
