
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from bbmlimits import (
    MapSpec,
    MeasureWithDensity,
    MollifierFamily,
    QuadratureConfig,
    Space,
    TargetSpace,
    density_estimate,
    inner_integral,
    ks,
    nonlocal_energy,
    pou_smooth,
    regularize,
    sandwich,
    tail_energy,
)
from bbmlimits.mollifiers import FAMILIES

UNIT = Space.interval()
SQUARE = Space.box([(0.0, 1.0), (0.0, 1.0)])
E = TargetSpace()
ID = MapSpec.identity()
MC = QuadratureConfig(method="monte-carlo")


def fam(kind, space=UNIT, p=2.0):
    return MollifierFamily(kind, p, space)


def rho0_reference(x, delta, p=2.0):
    def integrand(y):
        d = abs(y - x)
        return delta * d ** (p * delta) / (min(4 * d, x) + min(4 * d, 1 - x))

    left = quad(integrand, 0, x, points=[x - x / 4], limit=400)[0] if x > 0 else 0.0
    right = quad(integrand, x, 1, points=[x + (1 - x) / 4], limit=400)[0] if x < 1 else 0.0
    return left + right


def test_inner_examples():
    assert inner_integral(UNIT, ID, E, 2, fam("rho3"), 0.1, [0.5]) == pytest.approx(0.5, rel=1e-12)
    assert inner_integral(UNIT, ID, E, 2, fam("rho3"), 0.1, [0.0]) == pytest.approx(0.5, rel=1e-12)
    assert inner_integral(UNIT, ID, E, 2, fam("rho2"), 0.1, [0.0]) == pytest.approx(1.0, rel=1e-12)
    for kind in FAMILIES:
        assert inner_integral(UNIT, MapSpec.constant(2.0), E, 2, fam(kind), 0.1, [0.3]) == 0.0


def test_inner_rho1_near_boundary():
    # one-sided part of the ball: (x^3 + d^3) / (3 d^2 (x + d))
    x, d = 0.02, 0.1
    got = inner_integral(UNIT, ID, E, 2, fam("rho1"), d, [x])
    assert got == pytest.approx((x**3 + d**3) / (3 * d**2 * (x + d)), rel=1e-12)


@pytest.mark.parametrize("delta", [0.04, 0.01])
@pytest.mark.parametrize("x", [0.0, 1e-6, 1e-3, 0.05, 0.3, 0.5])
def test_inner_rho0_against_adaptive_quadrature(x, delta):
    got = inner_integral(UNIT, ID, E, 2, fam("rho0"), delta, [x])
    assert got == pytest.approx(rho0_reference(x, delta), rel=1e-6)


def test_rho1_energy_closed_form():
    # interior value 1/3 less a boundary layer of width delta on each side
    for delta in (0.08, 0.02):
        est = nonlocal_energy(UNIT, ID, E, 2, fam("rho1"), delta)
        assert est.value == pytest.approx(1 / 3 - delta / 9, rel=1e-12)
        assert est.stderr == 0.0 and est.method == "quadrature"


def test_rho2_energy_is_one():
    assert nonlocal_energy(UNIT, ID, E, 2, fam("rho2"), 0.05).value == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("kind", ["rho0", "rho2"])
def test_monte_carlo_agrees_with_quadrature(kind):
    ref = nonlocal_energy(UNIT, ID, E, 2, fam(kind), 0.05).value
    est = nonlocal_energy(UNIT, ID, E, 2, fam(kind), 0.05, MC, seed=1)
    assert est.n_samples == 100_000 and est.stderr > 0
    assert abs(est.value - ref) <= 3 * est.stderr


def test_monte_carlo_is_deterministic_and_worker_independent():
    cfg = QuadratureConfig(method="monte-carlo", n_outer=20_000)
    a = nonlocal_energy(UNIT, ID, E, 2, fam("rho3"), 0.05, cfg, seed=9)
    b = nonlocal_energy(UNIT, ID, E, 2, fam("rho3"), 0.05, QuadratureConfig(method="monte-carlo", n_outer=20_000,
                                                                          workers=3), seed=9)
    c = nonlocal_energy(UNIT, ID, E, 2, fam("rho3"), 0.05, cfg, seed=10)
    assert a == b
    assert a.value != c.value


@pytest.mark.parametrize("kind", FAMILIES)
def test_zero_law(kind):
    const = MapSpec.constant(4.0)
    assert nonlocal_energy(UNIT, const, E, 2, fam(kind), 0.05).value == 0.0
    assert nonlocal_energy(UNIT, const, E, 2, fam(kind), 0.05, MC).value == 0.0
    assert tail_energy(UNIT, const, E, 2, fam(kind), 0.05, 0.01) == 0.0
    assert ks(UNIT, const, E, 2, None, [0.5], 0.1) == 0.0
    assert density_estimate(UNIT, const, E, 2, [0.5]).density == 0.0


@pytest.mark.parametrize("kind", FAMILIES)
@pytest.mark.parametrize("c", [-3.0, 0.25])
def test_homogeneity(kind, c):
    f, g, p = MapSpec.power(2.0), MapSpec.power(2.0).scaled(c), 2.0
    scale = abs(c) ** p
    pairs = [
        (inner_integral(UNIT, f, E, p, fam(kind), 0.05, [0.4]), inner_integral(UNIT, g, E, p, fam(kind), 0.05, [0.4])),
        (nonlocal_energy(UNIT, f, E, p, fam(kind), 0.05).value, nonlocal_energy(UNIT, g, E, p, fam(kind), 0.05).value),
        (ks(UNIT, f, E, p, None, [0.3], 0.1), ks(UNIT, g, E, p, None, [0.3], 0.1)),
        (density_estimate(UNIT, f, E, p, [0.3]).density, density_estimate(UNIT, g, E, p, [0.3]).density),
    ]
    for base, scaled in pairs:
        assert scaled == pytest.approx(scale * base, rel=1e-9)


def test_tail_energy():
    assert tail_energy(UNIT, ID, E, 2, fam("rho1"), 0.05, 0.1) == 0.0
    assert tail_energy(UNIT, ID, E, 2, fam("rho2"), 0.1, 0.1) == 0.0
    assert tail_energy(UNIT, ID, E, 2, fam("rho3"), 0.2, 0.1) > 0.0
    seq = [tail_energy(UNIT, ID, E, 2, fam("rho0"), d, 0.1) for d in (0.08, 0.04, 0.02, 0.01)]
    assert all(b < a for a, b in zip(seq, seq[1:]))


def test_ks_examples():
    assert ks(UNIT, ID, E, 2, None, [0.5], 0.1) == pytest.approx(1 / 3, rel=1e-12)
    assert ks(UNIT, ID, E, 2, [(0.0, 0.5)], [0.5], 0.1) == pytest.approx(1 / 6, rel=1e-12)
    assert ks(SQUARE, MapSpec.coordinate(0), E, 2, None, [0.5, 0.5], 0.1) == pytest.approx(0.25, rel=1e-5)


@settings(max_examples=30, deadline=None)
@given(x=st.floats(0.0, 1.0), r=st.floats(1e-3, 0.5), a=st.floats(0.0, 0.4), b=st.floats(0.6, 1.0))
def test_ks_mask_monotone(x, r, a, b):
    inner_box = [(a + 0.1 * (b - a), b - 0.1 * (b - a))]
    small = ks(UNIT, MapSpec.power(2.0), E, 2, inner_box, [x], r)
    big = ks(UNIT, MapSpec.power(2.0), E, 2, [(a, b)], [x], r)
    assert small <= big + 1e-14


def test_density_estimate():
    prof = density_estimate(UNIT, ID, E, 2, [0.5])
    assert prof.density == pytest.approx(1 / 3, rel=1e-12)
    assert prof.residual < 1e-8
    quadratic = density_estimate(UNIT, MapSpec.power(2.0), E, 2, [0.5])
    assert quadratic.density == pytest.approx(1 / 3, rel=2e-3)
    free = density_estimate(UNIT, MapSpec.power(2.0), E, 2, [0.5], gamma=None)
    assert free.density == pytest.approx(1 / 3, rel=1e-10)


def test_density_estimate_underdetermined_warns():
    with pytest.warns(RuntimeWarning):
        prof = density_estimate(UNIT, MapSpec.power(2.0), E, 2, [0.5], radii=(0.1, 0.05, 0.02), gamma=None)
    assert not prof.converged


def test_regularize_examples():
    two = MeasureWithDensity(UNIT, lambda pts: np.full(pts.shape[:-1], 2.0))
    assert regularize(two, "riesz", [0.5], 0.1) == pytest.approx(2.0, abs=1e-8)
    half = MeasureWithDensity(UNIT, lambda pts: (pts[..., 0] <= 0.5).astype(float), ((0.0, 0.5),))
    assert regularize(half, "average", [0.5], 0.1) == pytest.approx(0.5, rel=1e-12)
    assert regularize(half, "maximal", [0.4], 0.05) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError):
        regularize(half, "median", [0.4], 0.05)


@settings(max_examples=30, deadline=None)
@given(x=st.floats(0.05, 0.95), r=st.floats(1e-3, 0.3))
def test_average_below_maximal(x, r):
    g = MeasureWithDensity(UNIT, lambda pts: np.sin(6 * pts[..., 0]) ** 2)
    assert regularize(g, "average", [x], r) <= regularize(g, "maximal", [x], r) + 1e-14


def test_pou_constant_and_identity():
    const = pou_smooth(UNIT, lambda pts: np.full(pts.shape[:-1], 3.5), 0.05)
    grid = np.linspace(0, 1, 401)[:, None]
    assert np.max(np.abs(const(grid) - 3.5)) <= 1e-14
    ident = pou_smooth(UNIT, lambda pts: pts[..., 0], 0.05)
    assert np.max(np.abs(ident(grid) - grid[:, 0])) <= 0.05
    assert np.max(np.abs(ident.partition_sum(grid) - 1)) < 1e-12


def test_pou_step_lipschitz_constant_is_stable():
    grid = np.linspace(0, 1, 4001)[:, None]
    consts = []
    for r in (0.1, 0.05, 0.025):
        sm = pou_smooth(UNIT, lambda pts: (pts[..., 0] >= 0.5).astype(float), r)
        slope = np.max(np.abs(np.diff(sm(grid)))) / (grid[1, 0] - grid[0, 0])
        consts.append(slope * r)
    assert max(consts) / min(consts) < 1.5


def test_pou_square_partition():
    sm = pou_smooth(SQUARE, lambda pts: pts[..., 0] + pts[..., 1], 0.2)
    pts = np.random.default_rng(0).random((200, 2))
    assert np.max(np.abs(sm.partition_sum(pts) - 1)) < 1e-12
    assert np.max(np.abs(sm(pts) - pts.sum(axis=1))) <= 2 * 0.2


@pytest.mark.parametrize("kind", FAMILIES)
@settings(max_examples=10, deadline=None)
@given(x=st.floats(0.3, 0.7), delta=st.sampled_from([0.05, 0.02]), r=st.sampled_from([0.1, 0.05]),
       h=st.sampled_from([1.5, 2.0]))
def test_layer_sums_bracket_inner_integral(kind, x, delta, r, h):
    # upper sum with each sigma jump paired with the next larger ball
    s = sandwich(UNIT, MapSpec.power(2.0), E, 2.0, fam(kind), delta, [x], r, h, shifted=True)
    low_ok, up_ok = s.holds()
    assert low_ok and up_ok, s


@pytest.mark.parametrize("kind", ["rho1", "rho3"])
def test_layer_sums_bracket_in_two_dimensions(kind):
    s = sandwich(SQUARE, MapSpec.coordinate(0), E, 2.0, fam(kind, SQUARE), 0.05, [0.45, 0.55], 0.1, 2.0,
                 shifted=True)
    assert all(s.holds()), s


@pytest.mark.parametrize("kind", FAMILIES)
def test_literal_upper_sum_is_a_lower_bound(kind):
    # pairing each jump with its own ball gives a layer-cake minorant
    s = sandwich(UNIT, ID, E, 2.0, fam(kind), 0.05, [0.5], 0.1, 2.0)
    assert s.lower <= s.upper <= s.middle * (1 + 1e-12)
