from fractions import Fraction

import pytest

from quarterwalk.errors import DegenerateModelError, ParseError
from quarterwalk.stepset import (
    INFINITE,
    REGISTRY,
    SINGULAR_MODELS,
    _from_mask,
    classify,
    covariance,
    group_order,
    is_singular,
    parse_step_set,
    phi,
    psi,
)


def all_models():
    return [_from_mask(m) for m in range(1, 256)]


def test_parse_forms_agree():
    a = parse_step_set("N,E,S,W")
    assert parse_step_set("w s e n") == a
    assert parse_step_set("simple") == a
    assert parse_step_set(a.mask) == a
    assert parse_step_set(str(a.mask)) == a
    assert a.k == 4 and a.names == ("N", "E", "S", "W")


@pytest.mark.parametrize("bad", ["", "N,Q", "0", "256", "0x1ff", ",,"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_step_set(bad)


def test_degenerate_reason():
    s = parse_step_set("N,E")
    assert s.degenerate
    assert s.degenerate_reason == "no step with i=-1"
    assert parse_step_set("N,E,S,W").degenerate_reason is None
    with pytest.raises(DegenerateModelError):
        group_order(s)


def test_there_are_exactly_five_singular_models_up_to_symmetry():
    sing = {s for s in all_models() if is_singular(s)}
    assert len(sing) == 7
    classes = {frozenset({s, s.reflect()}) for s in sing}
    assert len(classes) == 5
    assert {frozenset({s, s.reflect()}) for s in SINGULAR_MODELS} == classes


def test_involutions_fix_one_coordinate():
    s = REGISTRY["gessel"]
    x, y = Fraction(2, 7), Fraction(-3, 5)
    assert psi(s, x, y)[0] == x
    assert phi(s, x, y)[1] == y
    assert psi(s, *psi(s, x, y)) == (x, y)
    assert phi(s, *phi(s, x, y)) == (x, y)


@pytest.mark.parametrize(
    "name, order, sign",
    [
        ("simple", 4, 0),
        ("diagonal", 4, 0),
        ("order6-neg-a", 6, -1),
        ("order6-neg-b", 6, -1),
        ("kreweras", 6, 1),
        ("reverse-kreweras", 6, 1),
        ("double-kreweras", 6, 1),
        ("gouyou-beauchamps", 8, -1),
        ("gessel", 8, 1),
        ("simple-ne", INFINITE, 1),
    ],
)
def test_registry_orders(name, order, sign):
    c = classify(REGISTRY[name])
    assert c.group_order == order
    assert (c.covariance > 0) - (c.covariance < 0) == sign


def test_symbolic_confirmation_matches():
    for name in ("simple", "kreweras", "gessel", "gouyou-beauchamps"):
        s = REGISTRY[name]
        assert group_order(s, symbolic=True) == group_order(s)


def test_census_of_finite_groups():
    orders = {}
    for s in all_models():
        if s.degenerate or is_singular(s):
            continue
        o = group_order(s)
        orders[o] = orders.get(o, 0) + 1
    # 23 finite-group models up to the x/y symmetry; counted here with it
    assert orders[6] == 6 and orders[8] == 4
    assert orders[4] == 29


def test_order_four_implies_zero_covariance():
    for s in all_models():
        if s.degenerate or is_singular(s):
            continue
        if group_order(s) == 4:
            assert covariance(s) == 0


def test_zero_covariance_does_not_imply_order_four():
    # {N,E,SE,SW} has covariance 0 and an infinite group
    s = parse_step_set("N,E,SE,SW")
    assert covariance(s) == 0
    assert group_order(s, symbolic=True) == INFINITE


def test_classification_dict_keys():
    d = classify(REGISTRY["gessel"]).as_dict()
    assert {"steps", "k", "covariance", "delta", "singular", "group_order", "cgf_nature"} <= set(d)
    assert d["cgf_nature"] == "algebraic" and d["delta"] == 1


def test_singular_models_classify_as_infinite():
    for s in SINGULAR_MODELS:
        c = classify(s)
        assert c.singular and c.group_order == INFINITE and c.delta == 0
