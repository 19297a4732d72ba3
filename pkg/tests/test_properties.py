"""Randomized properties (hypothesis)."""

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from quarterwalk import oracle
from quarterwalk.cgf import bracket, build_cgf
from quarterwalk.elliptic import Lattice, build_uniformization
from quarterwalk.kernel import branch_points, branch_roots, build_kernel, kernel_value
from quarterwalk.stepset import COMPASS, REGISTRY, StepSet, parse_step_set

REGULAR = sorted(n for n in REGISTRY if not n.startswith("singular") and n != "diagonal")
SETTINGS = settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])

masks = st.integers(min_value=1, max_value=255)
models = st.sampled_from(REGULAR)
fracs = st.floats(min_value=0.05, max_value=0.95)
small = st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False)


def from_mask(m):
    names = [n for b, n in enumerate(COMPASS) if m >> b & 1]
    return parse_step_set(",".join(names))


@SETTINGS
@given(masks)
def test_parse_roundtrip_and_reflection(m):
    s = from_mask(m)
    assert parse_step_set(str(s)) == s
    assert s.reflect().reflect() == s
    assert s.reflect().k == s.k


@SETTINGS
@given(masks, st.integers(min_value=0, max_value=7))
def test_counts_bounded_and_nonnegative(m, n):
    s = from_mask(m)
    t = oracle.count(s, n)
    for length in range(n + 1):
        assert t.q[length].min() >= 0
        assert t.total(length) <= s.k**length


@SETTINGS
@given(masks)
def test_reflected_model_has_transposed_counts(m):
    s = from_mask(m)
    a, b = oracle.count(s, 6), oracle.count(s.reflect(), 6)
    for n in range(7):
        assert np.array_equal(a.q[n], b.q[n].T)


@SETTINGS
@given(models, fracs, small, small)
def test_kernel_polynomial_identity(name, frac, x, y):
    s = REGISTRY[name]
    assume(abs(x) > 1e-3 and abs(y) > 1e-3)
    kd = build_kernel(s, frac / s.k)
    scale = 1 + abs(x * y) * (1 + abs(x) + abs(y)) ** 2
    assert abs(kd.value(x, y) - kernel_value(s, x, y, kd.z)) < 1e-12 * scale


@SETTINGS
@given(models, fracs, small)
def test_branch_roots_annihilate_kernel(name, frac, t):
    s = REGISTRY[name]
    assume(abs(t) > 1e-2)
    kd = build_kernel(s, frac / s.k)
    for r in branch_roots(kd, "y", t):
        assert abs(kd.value(t, r)) < 1e-9 * (1 + abs(r)) ** 2


@SETTINGS
@given(models, fracs)
def test_branch_point_ordering(name, frac):
    s = REGISTRY[name]
    bp = branch_points(build_kernel(s, frac / s.k))
    for p1, p2, p3, p4 in (bp.x, bp.y):
        assert abs(p1) < p2 < 1 < p3 < abs(p4)


@SETTINGS
@given(st.floats(0.5, 2.0), st.floats(0.5, 2.0), st.floats(0.05, 0.45), st.floats(0.05, 0.45))
def test_wp_is_even_and_periodic(a, b, re, im):
    lat = Lattice(a, b)
    w = re * a + 1j * im * b
    v = lat.wp(w)
    assert abs(lat.wp(-w) - v) < 1e-8 * (1 + abs(v))
    assert abs(lat.wp(w + a) - v) < 1e-8 * (1 + abs(v))
    assert abs(lat.wp(w + 1j * b) - v) < 1e-8 * (1 + abs(v))


_GESSEL = build_cgf(build_uniformization(build_kernel("E,SW,W,NE", 0.1)))


class _Mobius:
    """``(a w + b) / (c w + d)`` applied to another evaluator."""

    def __init__(self, e, a, b, c, d):
        self.e, self.m = e, (a, b, c, d)

    def w_dw(self, t):
        a, b, c, d = self.m
        w, dw = self.e.w_dw(t)
        den = c * w + d
        return (a * w + b) / den, (a * d - b * c) * dw / den**2

    def w(self, t):
        return self.w_dw(t)[0]


coef = st.floats(-3, 3).filter(lambda v: abs(v) > 0.1)


@SETTINGS
@given(coef, coef, coef, coef)
def test_bracket_is_mobius_invariant(a, b, c, d):
    assume(abs(a * d - b * c) > 0.1)
    t, x = 0.02 + 0.01j, 0.05 - 0.03j
    ref = bracket(_GESSEL, t, x)
    m = _Mobius(_GESSEL, a, b, c, d)
    # keep the image away from the pole of the Mobius map
    assume(min(abs(c * _GESSEL.w(p) + d) for p in (t, x, 0.0)) > 1e-2)
    assert abs(bracket(m, t, x) - ref) < 1e-7 * (1 + abs(ref))


@SETTINGS
@given(st.lists(st.sampled_from(sorted(COMPASS)), min_size=1, max_size=8, unique=True))
def test_stepset_from_names_matches_mask(names):
    s = parse_step_set(",".join(names))
    assert s == StepSet(frozenset(COMPASS[n] for n in names))
    assert bin(s.mask).count("1") == s.k
