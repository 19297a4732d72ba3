import math

import numpy as np
import pytest

from quarterwalk.errors import DomainError
from quarterwalk.oracle import count, partial_sum_with_bound, tail_bound
from quarterwalk.stepset import REGISTRY


def test_simple_walk_small_counts():
    t = count("N,E,S,W", 6)
    assert [t(0, 0, n) for n in range(7)] == [1, 0, 2, 0, 10, 0, 70]
    # walks of length n in the quadrant: central binomial products
    assert t.total(2) == 6


def test_kreweras_excursions():
    t = count(REGISTRY["kreweras"], 9)
    assert [t(0, 0, 3 * n) for n in range(4)] == [1, 2, 16, 192]


def test_gessel_excursions():
    t = count(REGISTRY["gessel"], 8)
    assert [t(0, 0, 2 * n) for n in range(5)] == [1, 2, 11, 85, 782]


def test_out_of_range():
    t = count("N,E,S,W", 3)
    assert t(5, 0, 3) == 0 and t(-1, 0, 2) == 0
    with pytest.raises(DomainError):
        t(0, 0, 4)


def test_csv_header_and_rows():
    text = count("W,NE,S", 3).to_csv(n=3)
    lines = text.strip().split("\n")
    assert lines[0] == "i,j,n,q"
    assert "0,0,3,2" in lines


def test_symmetric_model_counts_are_symmetric():
    t = count(REGISTRY["gessel"].reflect(), 10)
    s = count(REGISTRY["simple"], 10)
    for n in range(11):
        assert np.array_equal(s.q[n], s.q[n].T)
    assert t.q[10].sum() > 0


def test_partial_sum_and_bound():
    t = count("N,E,S,W", 40)
    v, b = partial_sum_with_bound(t, 1.0, 1.0, 0.125)
    assert b == pytest.approx(0.5**41 / 0.5)
    assert 1 < v < 2
    with pytest.raises(DomainError):
        partial_sum_with_bound(t, 1.0, 1.0, 0.25)
    with pytest.raises(DomainError):
        partial_sum_with_bound(t, 1.5, 0.0, 0.1)


def test_modes():
    t = count("N,E,S,W", 20)
    z = 0.1
    origin, _ = partial_sum_with_bound(t, 0.3, 0.4, z, mode="origin")
    direct = math.fsum(t(0, 0, n) * z**n for n in range(21))
    assert origin == pytest.approx(direct, abs=1e-15)
    xa, _ = partial_sum_with_bound(t, 0.3, 0.4, z, mode="x-axis")
    direct = math.fsum(t(i, 0, n) * 0.3**i * z**n for n in range(21) for i in range(n + 1))
    assert xa == pytest.approx(direct, abs=1e-15)


def test_tail_bound_formula():
    assert tail_bound(3, 0.2, 60) == pytest.approx(0.6**61 / 0.4)
