import math

import numpy as np
import pytest

from quarterwalk.errors import DomainError, NumericError, RegionError
from quarterwalk.kernel import (
    X0,
    Y0,
    branch_points,
    branch_roots,
    build_kernel,
    kernel_value,
    region_contains,
    sample_critical_curve,
)
from quarterwalk.stepset import REGISTRY, SINGULAR_MODELS

REGULAR = [n for n in REGISTRY if not n.startswith("singular")]


def test_coefficients_simple():
    kd = build_kernel("N,E,S,W", 1 / 8)
    assert np.allclose(kd.a[:3], [0, 1 / 8, 0])
    assert np.allclose(kd.b[:3], [1 / 8, -1, 1 / 8])
    assert np.allclose(kd.c[:3], [0, 1 / 8, 0])


def test_coefficients_w_ne_s():
    z = 0.2
    kd = build_kernel("W,NE,S", z)
    assert np.allclose(np.trim_zeros(kd.a, "b"), [0, 0, z])
    assert np.allclose(np.trim_zeros(kd.b, "b"), [z, -1])
    assert np.allclose(np.trim_zeros(kd.c, "b"), [0, z])


def test_z_bounds():
    with pytest.raises(DomainError):
        build_kernel("N,E,S,W", 0.5)
    with pytest.raises(DomainError):
        build_kernel("N,E,S,W", 0.25)
    build_kernel("N,E,S,W", 0.25, allow_boundary=True)


def test_kernel_value_examples():
    s = "N,E,S,W"
    assert abs(kernel_value(s, 1, 3 - 2 * math.sqrt(2), 1 / 8)) < 1e-15
    assert kernel_value(s, 1, 1, 1 / 8) == pytest.approx(-0.5)
    assert kernel_value(s, 0.3, 0.7, 1e-14) == pytest.approx(-0.21)
    with pytest.raises(DomainError):
        kernel_value(s, 0, 1, 0.1)


@pytest.mark.parametrize("name", REGULAR)
def test_bivariate_identity(name):
    s = REGISTRY[name]
    kd = build_kernel(s, 0.5 / s.k)
    rng = np.random.default_rng(1)
    for _ in range(20):
        x, y = rng.normal(size=2) + 1j * rng.normal(size=2)
        scale = 1 + abs(x * y) * (1 + abs(x) + abs(y)) ** 2
        assert abs(kd.value(x, y) - kernel_value(s, x, y, kd.z)) < 1e-12 * scale


def test_branch_points_simple():
    kd = build_kernel("N,E,S,W", 1 / 8)
    bp = branch_points(kd)
    want = (5 - math.sqrt(24), 3 - math.sqrt(8), 3 + math.sqrt(8), 5 + math.sqrt(24))
    assert np.allclose(bp.x, want, rtol=0, atol=1e-12)
    assert np.allclose(bp.y, want, rtol=0, atol=1e-12)


def test_degree_three_gives_infinite_fourth_point():
    bp = branch_points(build_kernel("W,NE,S", 0.2))
    assert math.isinf(bp.x[3])


@pytest.mark.parametrize("name", [n for n in REGULAR if n != "diagonal"])
@pytest.mark.parametrize("frac", [0.3, 0.6, 0.9])
def test_ordering_invariant(name, frac):
    s = REGISTRY[name]
    kd = build_kernel(s, frac / s.k)
    bp = branch_points(kd)
    for pts, d in ((bp.x, kd.d), (bp.y, kd.dt)):
        p1, p2, p3, p4 = pts
        assert abs(p1) < p2 < 1 < p3 < abs(p4)
        assert abs(np.polyval(d[::-1], p2)) < 1e-12


@pytest.mark.parametrize("frac", [0.3, 0.6, 0.9])
def test_diagonal_model_has_symmetric_branch_points(frac):
    # d is even in x, so x1 = -x2 and x4 = -x3: the outer inequalities are equalities
    bp = branch_points(build_kernel(REGISTRY["diagonal"], frac / 4))
    for p1, p2, p3, p4 in (bp.x, bp.y):
        assert p1 == pytest.approx(-p2, rel=1e-12)
        assert p4 == pytest.approx(-p3, rel=1e-12)
        assert p2 < 1 < p3


def test_reflection_swaps_branch_points():
    kd = build_kernel(REGISTRY["gessel"], 0.1)
    a, b = branch_points(kd), branch_points(kd.reflected())
    assert np.allclose(a.x, b.y) and np.allclose(a.y, b.x)


def test_singular_branch_points_rejected():
    with pytest.raises((DomainError, NumericError)):
        branch_points(build_kernel(SINGULAR_MODELS[0], 0.2))


def test_roots_simple_at_one():
    kd = build_kernel("N,E,S,W", 1 / 8)
    r0, r1 = branch_roots(kd, "y", 1.0)
    assert r0 == pytest.approx(3 - 2 * math.sqrt(2), abs=1e-14)
    assert r1 == pytest.approx(3 + 2 * math.sqrt(2), abs=1e-13)


@pytest.mark.parametrize("name", ["simple", "gessel", "kreweras", "gouyou-beauchamps"])
def test_vieta_and_vanishing(name):
    s = REGISTRY[name]
    kd = build_kernel(s, 0.5 / s.k)
    rng = np.random.default_rng(4)
    t = rng.uniform(-2, 2, 50) + 1j * rng.uniform(-2, 2, 50)
    r0, r1 = branch_roots(kd, "y", t)
    a = np.polyval(kd.a[::-1], t)
    b = np.polyval(kd.b[::-1], t)
    c = np.polyval(kd.c[::-1], t)
    assert np.max(np.abs(a * r0 * r1 - c)) < 1e-12 * (1 + np.max(np.abs(c)))
    assert np.max(np.abs(a * (r0 + r1) + b)) < 1e-12 * (1 + np.max(np.abs(b)))
    assert np.all(np.abs(r0) <= np.abs(r1))
    assert np.max(np.abs(kd.value(t, r0))) < 1e-10


def test_y0_inside_disc_on_unit_circle():
    for name in ("simple", "gessel", "kreweras", "simple-ne"):
        s = REGISTRY[name]
        kd = build_kernel(s, 0.5 / s.k)
        t = np.exp(2j * np.pi * (np.arange(64) + 0.5) / 64)
        assert np.all(np.abs(Y0(kd, t)) < 1)


def test_cut_conventions_are_conjugate():
    kd = build_kernel(REGISTRY["gessel"], 0.1)
    x1, x2 = branch_points(kd).x[:2]
    t = np.linspace(x1, x2, 9)[1:-1]
    up = Y0(kd, t, cut="upper")
    lo = Y0(kd, t, cut="lower")
    assert np.allclose(up, np.conj(lo))
    assert np.all(up.imag != 0)


def test_simple_walk_curve_is_unit_circle():
    pts = sample_critical_curve(build_kernel("N,E,S,W", 1 / 8), "x", 128)
    assert np.max(np.abs(np.abs(pts) - 1)) < 1e-10


def test_gessel_curve_leaves_unit_disc():
    pts = sample_critical_curve(build_kernel(REGISTRY["gessel"], 0.1), "x", 128)
    assert np.any(np.abs(pts) > 1)


@pytest.mark.parametrize("name", ["gessel", "kreweras", "simple-ne"])
def test_curve_is_conjugation_symmetric(name):
    s = REGISTRY[name]
    pts = sample_critical_curve(build_kernel(s, 0.5 / s.k), "x", 64)
    gap = np.abs(np.conj(pts)[:, None] - pts[None, :]).min(axis=1)
    assert np.max(gap) < 1e-12


def test_curve_needs_samples():
    with pytest.raises(DomainError):
        sample_critical_curve(build_kernel("N,E,S,W", 0.1), "x", 4)


@pytest.mark.parametrize("name", REGULAR)
def test_region_membership(name):
    s = REGISTRY[name]
    kd = build_kernel(s, 0.5 / s.k)
    bp = branch_points(kd)
    assert region_contains(kd, "GX", bp.x[0], bp)
    assert not region_contains(kd, "GX", bp.x[2], bp)
    assert region_contains(kd, "GY", bp.y[0], bp)
    assert not region_contains(kd, "GY", bp.y[2], bp)


def test_region_simple_contains_origin():
    assert region_contains(build_kernel("N,E,S,W", 1 / 8), "GX", 0)


def test_region_ambiguous_on_curve():
    kd = build_kernel("N,E,S,W", 1 / 8)
    with pytest.raises(RegionError):
        region_contains(kd, "GX", 1.0)


def test_x0_y0_reciprocal():
    s = REGISTRY["gessel"]
    kd = build_kernel(s, 0.1)
    bp = branch_points(kd)
    rng = np.random.default_rng(8)
    done = 0
    while done < 20:
        x = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        if not region_contains(kd, "GX", x, bp):
            continue
        assert abs(X0(kd, Y0(kd, x)) - x) < 1e-9
        done += 1
