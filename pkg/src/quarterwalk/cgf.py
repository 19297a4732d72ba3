"""Conformal gluing functions (CGFs) for the regions GX and GY.

A CGF ``w`` of GX is meromorphic there, maps it conformally onto a cut
plane, and satisfies ``w(t) = w(conj t)`` on the bounding curve
X([y1, y2]).  The general construction is elliptic::

    w(t) = wp13(x^{-1}(t) - (omega1 + omega2)/2)

with ``wp13`` the Weierstrass function of the lattice (omega1, omega3).  For
finite groups the same function (up to a Mobius change) is rational or
quadratic in ``t``, and :func:`build_closed_form` builds those forms
independently of ``wp13``.  ``w~`` for GY is always ``w(X0(t))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .elliptic import Lattice, Uniformization
from .errors import DomainError, NumericError, PoleError
from .kernel import branch_roots, root_derivative, sample_critical_curve
from .stepset import INFINITE, StepSet, covariance, group_order, parse_step_set

VARIANTS = (
    "general-elliptic",
    "rational-order4",
    "rational-order6-neg",
    "rational-order8",
    "quadratic-order6-pos",
    "cubic-gessel-numeric",
)


def _on_x_cut(u: Uniformization, t) -> np.ndarray:
    """Real points of [x3, x4] (through infinity when x4 < 0)."""
    t = np.asarray(t, complex)
    x3, x4 = u.bp.x[2], u.bp.x[3]
    r = t.real
    real = np.abs(t.imag) <= 1e-14 * (1 + np.abs(r))
    if math.isinf(x4):
        inside = r >= x3
    elif x4 > 0:
        inside = (r >= x3) & (r <= x4)
    else:
        inside = (r >= x3) | (r <= x4)
    return real & inside


class CgfEvaluator:
    """Base class: subclasses provide ``_w_dw`` (values and t-derivatives)."""

    variant = "abstract"

    def __init__(self, u: Uniformization):
        self.u = u
        self.kd = u.kernel

    # to be provided
    def _w_dw(self, t):  # pragma: no cover - abstract
        raise NotImplementedError

    def _check(self, t):
        t = np.asarray(t, complex)
        if np.any(_on_x_cut(self.u, t)):
            raise DomainError("w is meromorphic only off the cut [x3, x4]")
        if np.any(np.abs(t - self.u.bp.x[1]) < 1e-13 * (1 + abs(self.u.bp.x[1]))):
            raise PoleError("w has a simple pole at x2")
        return t

    def w(self, t):
        return self.w_dw(t)[0]

    def dw(self, t):
        return self.w_dw(t)[1]

    def w_dw(self, t):
        scalar = np.ndim(t) == 0
        t = self._check(t)
        w, dw = self._w_dw(t)
        if scalar:
            return complex(np.ravel(w)[0]), complex(np.ravel(dw)[0])
        return w, dw

    # the y-side function
    def wt_dwt(self, y, cut=None):
        """``w~(y) = w(X0(y))`` and its derivative; ``cut`` picks the boundary
        value of ``X0`` on ``[y1, y2]``."""
        y = np.asarray(y, complex)
        x0, _ = branch_roots(self.kd, "x", y, cut=cut)
        w, dw = self.w_dw(x0)
        dx = root_derivative(self.kd, "x", y, x0)
        return w, dw * dx

    def w_tilde(self, y, cut=None):
        return self.wt_dwt(y, cut)[0]

    def eval(self, t):
        """``(w(t), w'(t), w_tilde)`` with ``w_tilde`` a callable for the y-side."""
        w, dw = self.w_dw(t)
        return w, dw, self.w_tilde


class GeneralCgf(CgfEvaluator):
    """``w(t) = wp13(x^{-1}(t) - (omega1 + omega2)/2)``.

    ``hint`` chooses the representative of ``x^{-1}``: ``"half"`` (real part
    in ``[omega2/2, omega2]``) is the correct one; ``"flipped"`` negates it,
    which shifts the argument of ``wp13`` by ``omega2`` and breaks the
    gluing property unless ``omega2/omega3`` is a half-integer.  It exists
    only as a negative control.
    """

    variant = "general-elliptic"

    def __init__(self, u: Uniformization, hint: str = "half"):
        super().__init__(u)
        if hint not in ("half", "cgf", "flipped"):
            raise ValueError(f"unknown branch hint {hint!r}")
        self.hint = hint
        self.lat13: Lattice = u.lattice13
        self.shift = (u.omega1 + u.omega2) / 2

    def omega(self, t):
        if self.hint == "flipped":
            return -self.u.x_inverse(t, "half")
        return self.u.x_inverse(t, self.hint)

    def _w_dw(self, t):
        u = self.u
        om = self.omega(t)
        arg = om - self.shift
        w = self.lat13.wp(arg)
        dp = u.wp_prime(om)
        sgn = -1.0 if self.hint == "flipped" else 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            dw = self.lat13.wp_prime(arg) * u.f_prime(t) / dp * sgn
        return w, dw


def build_cgf(u: Uniformization, hint: str = "half") -> GeneralCgf:
    return GeneralCgf(u, hint)


# --- closed forms -------------------------------------------------------------------


def _S(text):
    return parse_step_set(text)


ORDER6_NEG = {_S("N,SE,W"): ("t^2", "t"), _S("N,E,SE,S,W,NW"): ("t(t+1)", "t(t+1)")}
ORDER6_POS = {_S("W,NE,S"): "t^2", _S("N,E,SW"): "t", _S("N,NE,E,S,SW,W"): "t(t+1)"}
ORDER8 = {_S("E,SE,W,NW")}
GESSEL = _S("E,SW,W,NE")

_NUMERATORS = {
    "t^2": (lambda t: t * t, lambda t: 2 * t),
    "t": (lambda t: t, lambda t: np.ones_like(t)),
    "t(t+1)": (lambda t: t * (t + 1), lambda t: 2 * t + 1),
}


class RationalCgf(CgfEvaluator):
    """A rational function of ``t``; ``w`` and ``w~`` are given separately.

    Each side is described by a numerator polynomial (numpy coefficients,
    increasing degree) and a list of poles with multiplicities.  ``fit``
    and ``fit_tilde`` hold the Mobius constants relating each side to the
    elliptic CGF, followed by the held-out residual of that fit.
    """

    def __init__(self, u, variant, num, poles, num_t, poles_t):
        super().__init__(u)
        self.variant = variant
        self.num, self.poles = np.asarray(num, float), poles
        self.num_t, self.poles_t = np.asarray(num_t, float), poles_t
        self.fit = None
        self.fit_tilde = None

    @staticmethod
    def _rat(t, num, poles):
        from numpy.polynomial import polynomial as P

        n = P.polyval(t, num)
        dn = P.polyval(t, P.polyder(num))
        den = np.ones_like(t)
        logd = np.zeros_like(t)
        for p, m in poles:
            den = den * (t - p) ** m
            logd = logd + m / (t - p)
        r = n / den
        return r, dn / den - r * logd

    def _w_dw(self, t):
        return self._rat(t, self.num, self.poles)

    def wt_dwt(self, y, cut=None):
        y = np.asarray(y, complex)
        return self._rat(y, self.num_t, self.poles_t)



class QuadraticCgf(CgfEvaluator):
    """Order-6 walks with positive covariance: ``w`` is the root with a pole
    at ``x2`` of ``w^2 - (e3 + p14) w + (A + e3 p14) = 0`` where
    ``p14 = K1 + K2 u(t) / ((t - x2)(t - 1/sqrt(x2))^2)``."""

    variant = "quadratic-order6-pos"

    def __init__(self, u, shape, e3, g2_13, A, K1, K2, P, fit_residual):
        super().__init__(u)
        self.shape = shape
        self.e3, self.g2_13, self.A = e3, g2_13, A
        self.g3_13 = 4 * e3**3 - g2_13 * e3
        self.K1, self.K2, self.P = K1, K2, P
        self.fit_residual = fit_residual
        x2 = u.bp.x[1]
        self._poles = [(x2, 1), (1 / math.sqrt(x2), 2)]
        self._setup_root()

    def p14(self, t):
        num, dnum = _NUMERATORS[self.shape]
        r, dr = RationalCgf._rat(t, np.ones(1), self._poles)  # 1/den and its derivative
        n = num(t)
        return self.K1 + self.K2 * n * r, self.K2 * (dnum(t) * r + n * dr)

    def _square_root(self, t):
        """``g`` with ``w = (s + g)/2`` and its derivative.

        The radicand times the squared denominator is a sextic in ``t`` with
        double zeros at ``1/sqrt(x3)`` and ``-1/sqrt(x4)`` (zero when ``x4`` is
        infinite) and simple zeros at ``x3``, ``x4``.  Pulling the double zeros
        out leaves a square root that is single-valued off the cut
        ``[x3, x4]``, so ``w`` needs no path tracking: the two roots of the
        quadratic cross at ``1/sqrt(x3)`` and ``w`` passes straight through.
        """
        r, dr = RationalCgf._rat(t, np.ones(1), self._poles)
        h = (t - self._t0) * (t + self._t1)
        dh = 2 * t - self._t0 + self._t1
        x3, x4 = self.u.bp.x[2:]
        if math.isinf(x4):
            R = np.sqrt(x3 - t + 0j)
            dlog = 0.5 / (t - x3)
        else:
            R = (t - x3) * np.sqrt((t - x4) / (t - x3) + 0j)
            dlog = 0.5 / (t - x3) + 0.5 / (t - x4)
        g = self._kappa * h * R * r
        dg = self._kappa * R * (dh * r + h * dr + h * r * dlog)
        return g, dg

    def _radicand(self, t):
        p, _ = self.p14(t)
        return (p - self.e3) ** 2 - 4 * self.A

    def _setup_root(self):
        x2, x3, x4 = self.u.bp.x[1:]
        self._t0 = 1 / math.sqrt(x3)
        self._t1 = 0.0 if math.isinf(x4) else 1 / math.sqrt(x4)
        self._kappa = 1.0
        tau = np.array([-2.0 + 0j])
        g1, _ = self._square_root(tau)
        self._kappa = complex(np.sqrt(self._radicand(tau)[0] / g1[0] ** 2 + 0j))
        # orientation: the selected root carries the pole at x2
        near = np.array([x2 + 1e-6 * (x3 - x2) + 0j])
        p, _ = self.p14(near)
        g, _ = self._square_root(near)
        if abs(self.e3 + p[0] + g[0]) < abs(self.e3 + p[0] - g[0]):
            self._kappa = -self._kappa

    def _roots(self, t):
        t = np.atleast_1d(np.asarray(t, complex))
        p, _ = self.p14(t)
        g, _ = self._square_root(t)
        return (self.e3 + p + g) / 2, (self.e3 + p - g) / 2

    def _w_dw(self, t):
        t = np.atleast_1d(np.asarray(t, complex))
        p, dp = self.p14(t)
        g, dg = self._square_root(t)
        return (self.e3 + p + g) / 2, (dp + dg) / 2

    def wt_dwt(self, y, cut=None):
        # w~ = w on this family (the same function of the other variable)
        w, dw = self._w_dw(np.asarray(y, complex))
        return w, dw


def _affine_fit(target, basis, n_fit):
    """Least-squares ``target ~ alpha + beta * basis`` on the first ``n_fit``
    samples; returns ``(alpha, beta, max held-out relative residual)``."""
    M = np.stack([np.ones(n_fit), basis[:n_fit]], axis=1)
    coef, *_ = np.linalg.lstsq(M, target[:n_fit], rcond=None)
    pred = coef[0] + coef[1] * basis[n_fit:]
    res = np.abs(pred - target[n_fit:]) / (1 + np.abs(target[n_fit:]))
    return complex(coef[0]), complex(coef[1]), float(res.max())


def _sample_omegas(u: Uniformization, n: int, seed: int = 5):
    """Points of the strip Re in (omega2/2, (omega2 + omega3)/2) away from poles."""
    rng = np.random.default_rng(seed)
    re = u.omega2 / 2 + rng.uniform(0.15, 0.85, n) * u.omega3 / 2
    im = rng.uniform(0.1, 0.9, n) * abs(u.omega1)
    return re + 1j * im


def build_closed_form(s, u: Uniformization):
    """The closed-form CGF of a finite-group model.

    Gessel's walk (and any finite-group model outside the known families)
    falls back to the elliptic evaluator with variant
    ``"cubic-gessel-numeric"``.  Infinite groups raise.
    """
    s = parse_step_set(s)
    order = group_order(s)
    if order == INFINITE:
        raise DomainError("no closed form (infinite group: non-holonomic CGF)")
    bp = u.bp
    x1, x2, x3, x4 = bp.x
    y1, y2, y3, y4 = bp.y
    gen = GeneralCgf(u)
    if order == 4:
        poles, poles_t = [(x2, 1), (x3, 1)], [(y2, 1), (y3, 1)]
        num = _poly_from_roots([x1] + ([] if math.isinf(x4) else [x4]))
        num_t = _poly_from_roots([y1] + ([] if math.isinf(y4) else [y4]))
        ev = RationalCgf(u, "rational-order4", num, poles, num_t, poles_t)
    elif order == 6 and (s in ORDER6_NEG or s.reflect() in ORDER6_NEG):
        shape, shape_t = ORDER6_NEG.get(s) or ORDER6_NEG[s.reflect()][::-1]
        ev = RationalCgf(
            u, "rational-order6-neg",
            _shape_poly(shape), [(x2, 1), (1 / math.sqrt(x2), 2)],
            _shape_poly(shape_t), [(y2, 1), (1 / math.sqrt(y2), 2)],
        )
    elif order == 8 and (s in ORDER8 or s.reflect() in ORDER8):
        # both sides have their poles at the x-branch points of the model
        # listed in ORDER8; for its reflection those are the y-points
        p2, p3 = (x2, x3) if s in ORDER8 else (y2, y3)
        wpoly = (np.array([0.0, 0.0, 1.0]), [(p2, 1), (1.0, 2), (p3, 1)])
        tpoly = (np.array([0.0, 1.0, 2.0, 1.0]), [(p2, 2), (p3, 2)])
        if s not in ORDER8:
            wpoly, tpoly = tpoly, wpoly
        ev = RationalCgf(u, "rational-order8", wpoly[0], wpoly[1], tpoly[0], tpoly[1])
    elif order == 6 and s in ORDER6_POS:
        return _build_quadratic(s, u)
    else:
        gen.variant = "cubic-gessel-numeric"
        return gen
    # Mobius constants against the elliptic form, with held-out verification
    # (affine whenever the closed form has its simple pole at x2)
    om = _sample_omegas(u, 24)
    t = u.x_of(om)
    ev.fit = _mobius_fit(gen.w(t), ev.w(t), 12)
    y = _y_samples(u, gen, 24)
    ev.fit_tilde = _mobius_fit(gen.w_tilde(y, cut="upper"), ev.w_tilde(y), 12)
    return ev


def _y_samples(u, gen, n):
    """Points of (y1, y2); ``X0`` there (upper side) runs along the curve."""
    y1, y2 = u.bp.y[:2]
    return y1 + (y2 - y1) * np.random.default_rng(9).uniform(0.03, 0.97, n)


def _mobius_fit(target, basis, n_fit):
    """Fit ``target ~ (alpha + beta r)/(1 + gamma r)``; returns the three
    constants and the held-out relative residual.

    The y-side CGF ``w(X0(y))`` has its pole where ``X0(y) = x2``, not at a
    branch point, so it agrees with the closed form only up to a Mobius map.
    """
    r, v = basis[:n_fit], target[:n_fit]
    M = np.stack([np.ones(n_fit), r, -r * v], axis=1)
    (a, b, g), *_ = np.linalg.lstsq(M, v, rcond=None)
    r = basis[n_fit:]
    pred = (a + b * r) / (1 + g * r)
    res = np.abs(pred - target[n_fit:]) / (1 + np.abs(target[n_fit:]))
    return complex(a), complex(b), complex(g), float(res.max())


def _poly_from_roots(roots):
    from numpy.polynomial import polynomial as P

    return P.polyfromroots(roots) if roots else np.array([1.0])


def _shape_poly(shape):
    return {"t^2": np.array([0.0, 0.0, 1.0]), "t": np.array([0.0, 1.0]),
            "t(t+1)": np.array([0.0, 1.0, 1.0])}[shape]


def wp_third_period_value(g2: float, g3: float) -> float:
    """The positive root of ``x^4 - g2 x^2/2 - g3 x - g2^2/48`` (``wp(omega2/3)``)."""
    r = np.roots([1.0, 0.0, -g2 / 2, -g3, -(g2**2) / 48])
    pos = [z.real for z in r if abs(z.imag) < 1e-9 and z.real > 0]
    if len(pos) != 1:
        raise NumericError(f"expected one positive root, got {pos}")
    return pos[0]


def order6_pos_constants(g2: float, g3: float, P: float):
    """``(e3, g2_13, g3_13, A)`` from matching the two expansions of ``wp14``.

    With ``c2, c4`` the w^2, w^4 coefficients of ``wp14`` expressed through
    ``wp`` and ``P = wp(omega2/3)``, ``e3`` solves
    ``e^3 - (5/4) c2 e + (7/8) c4 = 0`` (largest real root).
    """
    c2 = 6 * P**2 - 9 * g2 / 20
    c4 = 10 * P**3 - 3 * g2 * P / 2 - 27 * g3 / 28
    roots = np.roots([1.0, 0.0, -1.25 * c2, 0.875 * c4])
    real = sorted(z.real for z in roots if abs(z.imag) < 1e-9 * (1 + abs(z)))
    e3 = real[-1]
    g2_13 = 15 * e3**2 - 5 * c2
    g3_13 = 28 * (c4 + 0.75 * e3**3 - 1.25 * c2 * e3)
    A = 3 * e3**2 - g2_13 / 4
    return e3, g2_13, g3_13, A


def _build_quadratic(s: StepSet, u: Uniformization) -> QuadraticCgf:
    P = wp_third_period_value(u.g2, u.g3)
    e3, g2_13, g3_13, A = order6_pos_constants(u.g2, u.g3, P)
    # K1, K2: fit wp14(x^{-1}(t) - (omega1+omega2)/2) = K1 + K2 u(t)/D(t)
    lat14 = Lattice(u.omega2 / 3, abs(u.omega1))
    om = _sample_omegas(u, 24)
    t = u.x_of(om)
    target = lat14.wp(om - (u.omega1 + u.omega2) / 2)
    x2 = u.bp.x[1]
    num, _ = _NUMERATORS[ORDER6_POS[s]]
    basis = num(t) / ((t - x2) * (t - 1 / math.sqrt(x2)) ** 2)
    K1, K2, res = _affine_fit(target, basis, 12)
    return QuadraticCgf(u, ORDER6_POS[s], e3, g2_13, A, K1.real, K2.real, P, res)


# --- kernels built from w -------------------------------------------------------------


def invariant_kernel(e: CgfEvaluator, t, x):
    """``w'(t) / (w(t) - w(x))``; unchanged by affine changes of ``w``."""
    t = np.asarray(t, complex)
    x = np.asarray(x, complex)
    if np.any(t == x):
        raise DomainError("invariant kernel is singular at t = x")
    wt, dwt = e.w_dw(t)
    wx = e.w(x)
    return dwt / (wt - wx)


def bracket(e: CgfEvaluator, t, x, base=0.0):
    """``w'(t)/(w(t) - w(x)) - w'(t)/(w(t) - w(base))`` in product form.

    Unlike the single quotient, this difference is invariant under every
    Mobius change of ``w``.
    """
    wt, dwt = e.w_dw(t)
    wx, wb = e.w(x), e.w(base)
    return dwt * (wx - wb) / ((wt - wx) * (wt - wb))


def gluing_residual(e: CgfEvaluator, n: int = 64, side: str = "x") -> float:
    """``max |w(t) - w(conj t)|`` over ``n`` points of X([y1, y2]) (or of
    Y([x1, x2]) for ``w~`` with ``side="y"``)."""
    kd, bp = e.kd, e.u.bp
    pts = sample_critical_curve(kd, side, n, bp)
    pts = pts[np.isfinite(pts)]
    if side == "x":
        a, b = e.w(pts), e.w(np.conj(pts))
    else:
        a, b = e.w_tilde(pts), e.w_tilde(np.conj(pts))
    return float(np.max(np.abs(a - b)))
