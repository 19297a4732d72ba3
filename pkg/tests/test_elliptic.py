import numpy as np
import pytest

from quarterwalk.cgf import wp_third_period_value
from quarterwalk.elliptic import (
    Lattice,
    addition_formula,
    build_uniformization,
    half_argument,
    transformation_sum,
    wp_eval,
)
from quarterwalk.errors import BranchError, PoleError
from quarterwalk.kernel import build_kernel
from quarterwalk.stepset import INFINITE, REGISTRY, classify, parse_step_set

REGULAR = [n for n in REGISTRY if not n.startswith("singular")]


def uni(steps, z=None):
    s = parse_step_set(steps)
    return build_uniformization(build_kernel(s, z if z is not None else 0.5 / s.k))


def random_points(u, n, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.05, 0.95, n) * u.omega2 + 1j * rng.uniform(0.05, 0.95, n) * abs(u.omega1)


@pytest.mark.parametrize(
    "steps, z, ratio",
    [("N,E,S,W", 1 / 8, 1 / 2), ("W,NE,S", 0.2, 2 / 3), ("E,SW,W,NE", 0.1, 3 / 4),
     ("N,SE,W", 0.2, 1 / 3), ("E,SE,W,NW", 0.1, 1 / 4)],
)
def test_rational_ratio(steps, z, ratio):
    assert uni(steps, z).ratio == pytest.approx(ratio, abs=1e-8)


@pytest.mark.parametrize("name", REGULAR)
def test_uniformization_invariants(name):
    u = uni(REGISTRY[name])
    assert u.omega1.real == 0 and u.omega1.imag > 0
    assert 0 < u.omega3 < u.omega2
    assert abs(u.e1 + u.e12 + u.e2) < 1e-10 * abs(u.e2)
    g2, g3 = u.lattice.invariants()
    assert g2 == pytest.approx(u.g2, rel=1e-8)
    assert g3 == pytest.approx(u.g3, rel=1e-8, abs=1e-12)


@pytest.mark.parametrize("name", REGULAR)
@pytest.mark.parametrize("frac", [0.3, 0.6, 0.9])
def test_covariance_trichotomy(name, frac):
    s = REGISTRY[name]
    u = uni(s, frac / s.k)
    cov = classify(s).covariance
    half = u.omega2 / 2
    if cov == 0:
        assert abs(u.omega3 - half) < 1e-8
    elif cov < 0:
        assert u.omega3 < half - 1e-8
    else:
        assert u.omega3 > half + 1e-8


def test_wp_half_periods_match_branch_points():
    u = uni("N,E,S,W", 1 / 8)
    assert u.wp(u.omega1 / 2).real == pytest.approx(u.f(u.bp.x[2]).real, abs=1e-8)
    assert u.wp(u.omega2 / 2).real == pytest.approx(u.f(u.bp.x[0]).real, abs=1e-8)


@pytest.mark.parametrize("periods", [(1.0, 1.7), (2.3, 0.6), (1.0, 1.0)])
def test_wp_ode(periods):
    lat = Lattice(*periods)
    g2, g3 = lat.invariants()
    w = random_points(type("L", (), {"omega2": periods[0], "omega1": 1j * periods[1]}), 50)
    p, dp = wp_eval(lat, g2, g3, w)
    res = dp**2 - (4 * p**3 - g2 * p - g3)
    assert np.max(np.abs(res) / (1 + np.abs(p) ** 3)) < 1e-8


def test_wp_laurent_at_origin():
    lat = Lattice(1.0, 1.3)
    w = 1e-3 * (1 + 1j)
    assert abs(lat.wp(w) - 1 / w**2) < 1e-3


def test_wp_pole():
    with pytest.raises(PoleError):
        Lattice(1.0, 1.0).wp(1.0 + 1j)


def test_second_derivative():
    lat = Lattice(1.0, 1.4)
    g2, _ = lat.invariants()
    w = np.array([0.31 + 0.22j, 0.6 + 0.5j])
    h = 1e-5
    d2 = (lat.wp_prime(w + h) - lat.wp_prime(w - h)) / (2 * h)
    assert np.max(np.abs(d2 - (6 * lat.wp(w) ** 2 - g2 / 2))) < 1e-6 * np.max(np.abs(d2))


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("axis", ["real", "imag"])
def test_landen_transformation(p, axis):
    lat = Lattice(1.0, 1.2)
    small = Lattice(1.0 / p, 1.2) if axis == "real" else Lattice(1.0, 1.2 / p)
    w = random_points(type("L", (), {"omega2": 0.9 / p, "omega1": 1.1j / p}), 20, 2)
    lhs = transformation_sum(lat, w, p, axis)
    assert np.max(np.abs(lhs - small.wp(w)) / (1 + np.abs(lhs))) < 1e-8


def test_addition_theorem():
    lat = Lattice(1.0, 0.8)
    rng = np.random.default_rng(6)
    w1 = rng.uniform(0, 1, 20) + 1j * rng.uniform(0, 0.8, 20)
    w2 = rng.uniform(0, 1, 20) + 1j * rng.uniform(0, 0.8, 20)
    lhs = lat.wp(w1 + w2)
    assert np.max(np.abs(lhs - addition_formula(lat, w1, w2)) / (1 + np.abs(lhs))) < 1e-8


@pytest.mark.parametrize("steps", ["N,SE,W", "W,NE,S"])
@pytest.mark.parametrize("z", [0.1, 0.2, 0.3])
def test_wp_third_period(steps, z):
    u = uni(steps, z)
    assert u.wp(u.omega2 / 3).real == pytest.approx(1 / 3, abs=1e-8)
    assert wp_third_period_value(u.g2, u.g3) == pytest.approx(u.wp(u.omega2 / 3).real, abs=1e-10)


def test_half_argument():
    lat = Lattice(1.0, 1.1)
    for w in (0.3, 0.45, 0.5):
        assert half_argument(lat, lat.wp(w)).real == pytest.approx(lat.wp(w / 2).real, rel=1e-10)
    # beyond the half period the nearest half-argument wins
    assert half_argument(lat, lat.wp(0.8)).real == pytest.approx(lat.wp(0.1).real, rel=1e-10)


@pytest.mark.parametrize("name", ["simple", "gessel", "kreweras", "gouyou-beauchamps", "simple-ne"])
def test_uniformization_on_kernel(name):
    u = uni(REGISTRY[name])
    w = random_points(u, 50, 3)
    x, y = u.uniformize(w)
    scale = 1 + np.abs(x * y) * (1 + np.abs(x) + np.abs(y)) ** 2
    assert np.max(np.abs(u.kernel.value(x, y)) / scale) < 1e-8
    x2, y2 = u.uniformize(u.phi(w))
    assert np.max(np.abs(y2 - y) / (1 + np.abs(y))) < 1e-9
    xm, ym = u.uniformize(u.psi(w))
    assert np.max(np.abs(xm - x) / (1 + np.abs(x))) < 1e-9
    a = np.polyval(u.kernel.a[::-1], x)
    c = np.polyval(u.kernel.c[::-1], x)
    assert np.max(np.abs(y * ym - c / a) / (1 + np.abs(c / a))) < 1e-8


def test_x_of_half_period():
    u = uni("E,SW,W,NE", 0.1)
    assert u.x_of(u.omega2 / 2).real == pytest.approx(u.bp.x[0], abs=1e-8)


def test_wp_inverse_roundtrip_and_strip():
    u = uni("E,SW,W,NE", 0.1)
    rng = np.random.default_rng(9)
    v = rng.normal(size=50) + 1j * rng.normal(size=50)
    w = u.wp_inverse(v, "principal")
    assert np.max(np.abs(u.wp(w) - v) / (1 + np.abs(v))) < 1e-9
    assert u.wp_inverse(u.e2, "half").real == pytest.approx(u.omega2 / 2, abs=1e-8)
    x1, x2 = u.bp.x[:2]
    t = np.linspace(x1, x2, 7)[1:-1]
    assert np.allclose(u.x_inverse(t, "half").real, u.omega2 / 2, atol=1e-8)


def test_wp_inverse_bad_hint():
    u = uni("N,E,S,W", 0.1)
    with pytest.raises(ValueError):
        u.wp_inverse(1.0, "sideways")


def test_cgf_strip_unavailable_off_region():
    u = uni("N,SE,W", 0.2)
    with pytest.raises(BranchError):
        u.x_inverse(np.array([5.0 + 3j, 0.2]), "cgf")


def test_infinite_group_ratio_moves():
    s = REGISTRY["simple-ne"]
    assert classify(s).group_order == INFINITE
    ratios = [uni(s, f / s.k).ratio for f in (0.3, 0.6, 0.9)]
    assert max(ratios) - min(ratios) > 1e-6
