import math

import numpy as np
import pytest

from bbmlimits import Space, Weight
from bbmlimits.shells import radial_integrate, radial_integrate_mc, shell_rule

UNIT = Space.interval()
SQUARE = Space.box([(0.0, 1.0), (0.0, 1.0)])


@pytest.mark.parametrize("x", [0.0, 0.03, 0.5, 0.97])
def test_interval_length(x):
    got = radial_integrate(UNIT, np.array([x]), np.ones_like, u_max=0.1)
    assert got == pytest.approx(min(0.1, x) + min(0.1, 1 - x), rel=1e-13)


def test_weighted_length():
    space = Space.interval(0.1, 0.9, Weight("inverse"))
    got = radial_integrate(space, np.array([0.5]), np.ones_like, u_max=0.2)
    assert got == pytest.approx(math.log(0.7 / 0.3), rel=1e-12)


@pytest.mark.parametrize("x", [(0.5, 0.5), (0.05, 0.5), (0.0, 0.0), (0.02, 0.97)])
def test_square_area(x):
    x = np.array(x)
    got = radial_integrate(SQUARE, x, np.ones_like, u_max=0.2)
    assert got == pytest.approx(SQUARE.measure_balls(x[None, :], [0.2])[0], rel=1e-5)


def test_radial_moment_with_substitution():
    # int_{-1}^{1} |u|^(beta - 1) du = 2 / beta, integrand singular at the center
    beta = 0.02
    got = radial_integrate(UNIT, np.array([0.5]), lambda u: u ** (beta - 1), u_max=0.5, beta=beta)
    assert got == pytest.approx(2 * 0.5**beta / beta, rel=1e-10)


def test_small_offsets_are_rescaled():
    # |x' - x|^2 u^-3 integrates to a log; the part near 0 needs the rescaling
    beta = 0.01
    fn = lambda pts: (pts[..., 0] - 0.5) ** 2  # noqa: E731
    got = radial_integrate(UNIT, np.array([0.5]), lambda u: u ** (beta - 3), fn, u_max=0.25, beta=beta, degree=2)
    assert got == pytest.approx(2 * 0.25**beta / beta, rel=1e-7)


def test_circle_shell_counts_antipode_once():
    circle = Space.circle(2.0)
    pts, w = shell_rule(circle, np.array([0.3]), np.array([0.5, 1.0]))
    assert w[0].sum() == 2.0
    assert w[1].sum() == 1.0
    assert radial_integrate(circle, np.array([0.3]), np.ones_like) == pytest.approx(2.0)


def test_monte_carlo_radial():
    rng = np.random.default_rng(3)
    est, err = radial_integrate_mc(SQUARE, np.array([0.5, 0.5]), np.ones_like, rng=rng, n=8192, u_max=0.3)
    assert abs(est - math.pi * 0.09) <= 4 * err + 1e-3
