import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbmlimits import (
    DegenerateSpaceError,
    DomainError,
    Space,
    Weight,
    ball_measure,
    dimension_at,
    estimate_doubling,
    sample_points,
)

UNIT = Space.interval()
SQUARE = Space.box([(0.0, 1.0), (0.0, 1.0)])
WEIGHTED = Space.interval(0.1, 0.9, Weight("inverse"))


def test_interval_balls():
    assert ball_measure(UNIT, [0.5], 0.1) == pytest.approx(0.2, abs=1e-15)
    assert ball_measure(UNIT, [0.05], 0.1) == pytest.approx(0.15, abs=1e-15)
    assert ball_measure(UNIT, [0.0], 5.0) == pytest.approx(1.0)


def test_weighted_ball():
    space = Space.interval(0.0, 1.0, Weight("inverse"))
    assert ball_measure(space, [0.5], 0.1) == pytest.approx(math.log(1.5), rel=1e-12)


def test_square_disc_area():
    assert ball_measure(SQUARE, [0.5, 0.5], 0.2) == pytest.approx(math.pi * 0.04, rel=1e-10)
    # quarter disc at a corner
    assert ball_measure(SQUARE, [0.0, 0.0], 0.3) == pytest.approx(math.pi * 0.09 / 4, rel=1e-10)


def test_cube_ball():
    cube = Space.box([(0.0, 1.0)] * 3)
    assert ball_measure(cube, [0.5, 0.5, 0.5], 0.2) == pytest.approx(4 / 3 * math.pi * 0.008, rel=1e-6)


def test_circle_balls():
    circle = Space.circle(2 * math.pi)
    assert ball_measure(circle, [0.1], 0.5) == pytest.approx(1.0)
    assert ball_measure(circle, [0.1], 10.0) == pytest.approx(2 * math.pi)
    assert circle.distance(np.array([[0.1]]), np.array([[2 * math.pi - 0.1]]))[0] == pytest.approx(0.2)


def test_ball_errors():
    with pytest.raises(DomainError):
        ball_measure(UNIT, [1.5], 0.1)
    with pytest.raises(DomainError):
        ball_measure(UNIT, [0.5], 0.0)


def test_tiny_balls_keep_precision():
    r = 1e-14
    assert ball_measure(UNIT, [0.7], r) == pytest.approx(2 * r, rel=1e-12)
    assert ball_measure(WEIGHTED, [0.5], r) == pytest.approx(2 * r / 0.5, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(x=st.floats(0.0, 1.0), r1=st.floats(1e-6, 1.0), r2=st.floats(1e-6, 1.0))
def test_monotone_in_radius(x, r1, r2):
    lo, hi = sorted((r1, r2))
    assert ball_measure(UNIT, [x], lo) <= ball_measure(UNIT, [x], hi) + 1e-15
    assert ball_measure(WEIGHTED, [0.1 + 0.8 * x], lo) <= ball_measure(WEIGHTED, [0.1 + 0.8 * x], hi) + 1e-15


@settings(max_examples=40, deadline=None)
@given(x=st.floats(0.2, 0.8), y=st.floats(0.2, 0.8), r=st.floats(1e-4, 0.2))
def test_interior_disc_is_exact(x, y, r):
    assert ball_measure(SQUARE, [x, y], r) == pytest.approx(math.pi * r * r, rel=1e-10)


def test_oracle_cache_is_consistent():
    first = ball_measure(WEIGHTED, [0.3], 0.05)
    again = ball_measure(WEIGHTED, [0.3], 0.05 * (1 + 1e-14))
    assert first == again


def test_sampling_is_deterministic():
    a = sample_points(UNIT, n=4, seed=7)
    b = sample_points(UNIT, n=4, seed=7)
    assert np.array_equal(a.points, b.points)
    assert np.array_equal(a.weights, b.weights)
    assert len(a) == 4
    assert all(pt.weight == pytest.approx(0.25) for pt in a)


@pytest.mark.parametrize("n", [1, 17, 1000])
def test_sample_weights_sum_to_measure(n):
    assert sample_points(UNIT, n=n, seed=3).weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert sample_points(SQUARE, [(0.0, 0.5), (0.0, 1.0)], n=n, seed=3).weights.sum() == pytest.approx(0.5)


def test_weighted_sampling_cdf():
    pts = np.sort(sample_points(WEIGHTED, n=100_000, seed=1).points[:, 0])
    empirical = np.arange(1, len(pts) + 1) / len(pts)
    exact = np.log(pts / 0.1) / math.log(9)
    assert np.max(np.abs(empirical - exact)) < 0.01


def test_custom_weight_sampling_is_importance_weighted():
    space = Space.interval(0.0, 1.0, Weight("custom", func=lambda x: 1.0 + x))
    s = sample_points(space, n=20_000, seed=5)
    assert s.weights.sum() == pytest.approx(1.5, rel=1e-6)
    # mean of x under (1 + x) dx is (1/2 + 1/3) / 1.5
    assert float(np.sum(s.weights * s.points[:, 0]) / 1.5) == pytest.approx(5 / 9, abs=2e-3)


def test_empty_region_rejected():
    with pytest.raises(DomainError):
        sample_points(UNIT, [(0.5, 0.5)], n=3)


def test_doubling_interval_and_square():
    assert estimate_doubling(UNIT).constant == pytest.approx(2.0, abs=0.01)
    rep = estimate_doubling(SQUARE, [(0.3, 0.7), (0.3, 0.7)], radii=(0.05, 0.02, 0.01))
    assert rep.constant == pytest.approx(4.0, abs=0.05)


def test_doubling_weighted():
    rep = estimate_doubling(WEIGHTED)
    assert math.isfinite(rep.constant) and rep.constant >= 2.0
    # the worst ball is the one whose double first reaches the heavy end
    assert rep.worst_center[0] == pytest.approx(0.1 + 2 * rep.worst_radius)


def test_zero_weight_rejected():
    with pytest.raises(DomainError):
        Space.interval(0.0, 1.0, Weight("custom", func=lambda x: (x > 0.5).astype(float)))


def test_doubling_degenerate(monkeypatch):
    monkeypatch.setattr(Space, "measure_balls", lambda self, x, r: np.zeros(len(x)))
    with pytest.raises(DegenerateSpaceError):
        estimate_doubling(UNIT, radii=(0.01,))


@pytest.mark.parametrize("space,x,d", [(UNIT, [0.5], 1.0), (UNIT, [0.0], 1.0), (SQUARE, [0.5, 0.5], 2.0)])
def test_dimension(space, x, d):
    est = dimension_at(space, x)
    assert est.value == pytest.approx(d, abs=0.02)
    assert est.converged


def test_dimension_needs_ratio_above_one():
    with pytest.raises(DomainError):
        dimension_at(UNIT, [0.5], h=1.0)
