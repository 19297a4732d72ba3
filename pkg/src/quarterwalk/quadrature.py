"""Adaptive-degree Gauss-Legendre quadrature with a degree-doubling error estimate."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import AccuracyError


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


def integrate(fun, a: float = 0.0, b: float = 1.0, tol: float = 1e-12,
              n0: int = 32, n_max: int = 2048, strict: bool = True):
    """Integrate a vectorised ``fun`` over ``[a, b]``.

    The degree starts at ``n0`` and doubles until two successive rules agree
    to ``tol`` (absolute, relative to max(1, |value|)).  Returns
    ``(value, error_estimate)``.  ``fun`` may return an array of shape
    ``(..., n)`` to integrate several functions on the same nodes.
    """
    prev = None
    n = n0
    while n <= n_max:
        x, w = gauss_legendre(n)
        vals = fun(a + (b - a) * x)
        cur = (b - a) * (np.asarray(vals) @ w)
        if prev is not None:
            err = np.max(np.abs(cur - prev))
            scale = max(1.0, float(np.max(np.abs(cur))))
            if err <= tol * scale:
                return cur, float(err)
        prev = cur
        n *= 2
    if strict:
        raise AccuracyError(f"quadrature did not reach {tol:g}", estimate=float(err))
    return cur, float(err)


def graded_breakpoints(a: float, b: float, h_lo: float = 0.5, h_hi: float = 0.5):
    """Breakpoints of ``[a, b]`` refined geometrically towards an end whose
    feature width (as a fraction of the length) is ``h_lo`` or ``h_hi``."""
    length = b - a
    left, right = [], []
    h = max(h_lo, 1e-300)
    while h < 0.25:
        left.append(a + h * length)
        h *= 4.0
    h = max(h_hi, 1e-300)
    while h < 0.25:
        right.append(b - h * length)
        h *= 4.0
    return [a] + left + [a + 0.5 * length] + right[::-1] + [b]


def integrate_graded(fun, a: float, b: float, h_lo: float = 0.5, h_hi: float = 0.5,
                     tol: float = 1e-12, **kw):
    """``integrate`` on the pieces of ``graded_breakpoints``; the pieces share
    the absolute tolerance scaled by the running total."""
    pts = graded_breakpoints(a, b, h_lo, h_hi)
    total, err = 0.0, 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        v, e = integrate(fun, lo, hi, tol=tol, **kw)
        total = total + v
        err += e
    return total, err
