"""Exact enumeration of quarter-plane walks and truncated generating-function sums.

The table ``q[n][i, j]`` counts walks of length ``n`` from the origin to
``(i, j)`` that never leave the quadrant.  Counts are Python integers, so
the table is exact at any length.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .stepset import StepSet, parse_step_set


@dataclass(frozen=True)
class CountTable:
    steps: StepSet
    n_max: int
    q: tuple  # q[n] is an (n_max+1, n_max+1) object array of ints

    def __call__(self, i: int, j: int, n: int) -> int:
        if n < 0 or n > self.n_max:
            raise DomainError(f"length {n} outside [0, {self.n_max}]")
        if i < 0 or j < 0 or i > n or j > n:
            return 0
        return int(self.q[n][i, j])

    def total(self, n: int) -> int:
        return int(self.q[n].sum())

    def rows(self, n=None, i=None, j=None):
        """Yield ``(i, j, n, q)`` for nonzero entries, optionally filtered."""
        lengths = range(self.n_max + 1) if n is None else [n]
        for m in lengths:
            arr = self.q[m]
            for a in range(m + 1) if i is None else [i]:
                for b in range(m + 1) if j is None else [j]:
                    if a > self.n_max or b > self.n_max:
                        continue
                    v = int(arr[a, b])
                    if v or (i is not None and j is not None):
                        yield a, b, m, v

    def to_csv(self, n=None, i=None, j=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "n", "q"])
        for row in self.rows(n, i, j):
            w.writerow(row)
        return buf.getvalue()


def count(s, n_max: int) -> CountTable:
    """Forward dynamic programming over lengths ``0..n_max``."""
    s = parse_step_set(s)
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    size = n_max + 1
    cur = np.zeros((size, size), dtype=object)
    cur[:, :] = 0
    cur[0, 0] = 1
    table = [cur]
    for _ in range(n_max):
        nxt = np.zeros((size, size), dtype=object)
        nxt[:, :] = 0
        for a, b in s.steps:
            # walks ending at (i, j) come from (i - a, j - b) inside the box
            src = cur[max(0, -a): size - max(0, a), max(0, -b): size - max(0, b)]
            nxt[max(0, a): size - max(0, -a), max(0, b): size - max(0, -b)] += src
        table.append(nxt)
        cur = nxt
    return CountTable(s, n_max, tuple(table))


def tail_bound(k: int, z: float, n_max: int) -> float:
    """Bound on the omitted terms ``n > n_max`` using ``sum_ij q(i,j;n) <= k^n``."""
    r = k * z
    return r ** (n_max + 1) / (1.0 - r)


def partial_sum_with_bound(t: CountTable, x=1.0, y=1.0, z=None, mode: str = "full"):
    """Truncated ``sum q(i,j;n) x^i y^j z^n`` and a bound on the remainder.

    ``mode`` restricts the sum: ``"x-axis"`` keeps ``j = 0`` (that is
    ``Q(x, 0; z)``), ``"y-axis"`` keeps ``i = 0`` and ``"origin"`` keeps
    ``i = j = 0``.
    """
    if z is None:
        raise DomainError("z is required")
    k = t.steps.k
    if not 0 < z < 1.0 / k:
        raise DomainError(f"z={z} outside (0, 1/{k})")
    if abs(x) > 1 or abs(y) > 1:
        raise DomainError("tail bound needs |x| <= 1 and |y| <= 1")
    total = partial_sum(t, x, y, z, mode)
    return total, tail_bound(k, z, t.n_max)


def partial_sum(t: CountTable, x=1.0, y=1.0, z=0.0, mode: str = "full"):
    """The truncated sum alone, with no tail bound and no range checks.

    Useful at ``z = 1/k`` where the geometric bound is unavailable; compare
    two truncation orders to judge convergence there.
    """
    N = t.n_max
    idx = np.arange(N + 1)
    px = np.asarray(complex(x)) ** idx
    py = np.asarray(complex(y)) ** idx
    if mode == "x-axis":
        py = np.zeros(N + 1, complex)
        py[0] = 1.0
    elif mode == "y-axis":
        px = np.zeros(N + 1, complex)
        px[0] = 1.0
    elif mode == "origin":
        px = np.zeros(N + 1, complex)
        py = np.zeros(N + 1, complex)
        px[0] = py[0] = 1.0
    elif mode != "full":
        raise DomainError(f"unknown mode {mode!r}")
    re, im = [], []
    for n in range(N + 1):
        arr = t.q[n][: n + 1, : n + 1].astype(float)
        v = px[: n + 1] @ arr @ py[: n + 1] * z**n
        re.append(v.real)
        im.append(v.imag)
    total = complex(math.fsum(re), math.fsum(im))
    if complex(x).imag == 0 and complex(y).imag == 0:
        return total.real
    return total
