"""Weierstrass functions on rectangular lattices and the uniformization of the
kernel curve.

The kernel curve ``{K(x, y) = 0}`` has genus one for non-singular models and
is parameterized by ``x = F(wp(w)), y = G(wp(w), wp'(w))`` where ``wp`` is the
Weierstrass function of the lattice ``omega1 Z + omega2 Z``, ``omega1`` purely
imaginary and ``omega2`` real.  A third real period ``omega3`` encodes the
automorphism ``w -> omega3 - w`` that fixes ``y``.

Conventions used throughout:

* ``f`` is the Mobius map with ``wp(w) = f(x(w))``;
* ``e1 = f(x3)``, ``e12 = f(x2)``, ``e2 = f(x1)`` are the values of ``wp`` at
  ``omega1/2``, ``(omega1+omega2)/2`` and ``omega2/2``;
* ``x^{-1}(t)`` means ``wp^{-1}(f(t))`` on a chosen strip of real parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import AccuracyError, BranchError, NumericError, PoleError
from .kernel import BranchPoints, KernelData, branch_points, branch_roots
from .quadrature import integrate, integrate_graded

# --- Weierstrass p on a rectangular lattice -------------------------------------


class Lattice:
    """Rectangular lattice ``real_period * Z + 1j * imag_period * Z``.

    ``wp`` and ``wp_prime`` use the Fourier (nome) series around the real
    half-period.  When the imaginary period is the shorter one the lattice
    is rotated by ``i`` first, using ``wp(u; L) = -wp(iu; iL)``, so the nome
    never exceeds ``exp(-pi)``.
    """

    def __init__(self, real_period: float, imag_period: float):
        if not (real_period > 0 and imag_period > 0):
            raise ValueError("lattice periods must be positive")
        self.A = float(real_period)
        self.B = float(imag_period)
        self._rot = self.B < self.A
        A, B = (self.B, self.A) if self._rot else (self.A, self.B)
        self._A, self._B = A, B
        om = A / 2.0
        q = math.exp(-math.pi * B / A)
        nmax = max(4, int(math.ceil(-40.0 / math.log(q))) + 2)
        n = np.arange(1, nmax + 1, dtype=float)
        self._n = n
        self._c = n * q ** (2 * n) / (1.0 - q ** (2 * n))
        self._k = math.pi / om
        self._h = math.pi / (2 * om)
        s = self._c.sum()
        self._const = -(math.pi**2 / (12 * om**2)) * (1 - 24 * s)  # = -eta/om
        self._e = None

    @property
    def periods(self):
        return self.A, 1j * self.B

    def _reduce(self, z, A, B):
        re = z.real - A * np.round(z.real / A)
        im = z.imag - B * np.round(z.imag / B)
        return re + 1j * im

    def _direct(self, z, deriv):
        A, B = self._A, self._B
        z = self._reduce(z, A, B)
        if np.any(np.abs(z) < 1e-12 * A):
            raise PoleError("argument on a lattice point")
        u = self._h * z
        sn = np.sin(u)
        arg = np.multiply.outer(z, self._n * self._k)
        if not deriv:
            series = np.cos(arg) @ self._c
            return self._const + self._h**2 / sn**2 - 2 * self._k**2 * series
        series = np.sin(arg) @ (self._n * self._c)
        return -2 * self._h**3 * np.cos(u) / sn**3 + 2 * self._k**3 * series

    def wp(self, z):
        z = np.asarray(z, complex)
        out = -self._direct(1j * z, False) if self._rot else self._direct(z, False)
        return out[()] if out.ndim == 0 else out

    def wp_prime(self, z):
        z = np.asarray(z, complex)
        out = -1j * self._direct(1j * z, True) if self._rot else self._direct(z, True)
        return out[()] if out.ndim == 0 else out

    def half_period_values(self):
        """``(wp(iB/2), wp((A+iB)/2), wp(A/2))``: smallest to largest, all real."""
        if self._e is None:
            vals = self.wp(np.array([0.5j * self.B, 0.5 * (self.A + 1j * self.B), 0.5 * self.A]))
            self._e = tuple(float(v.real) for v in vals)
        return self._e

    def invariants(self):
        e1, e12, e2 = self.half_period_values()
        g2 = -4 * (e1 * e12 + e1 * e2 + e12 * e2)
        g3 = 4 * e1 * e12 * e2
        return g2, g3


def wp_eval(lattice, g2=None, g3=None, omega=0j):
    """``(wp(omega), wp'(omega))`` for ``lattice = (real_period, imag_period)``.

    ``g2`` and ``g3`` are accepted for interface symmetry and checked
    against the lattice when given.
    """
    lat = lattice if isinstance(lattice, Lattice) else Lattice(*lattice)
    if g2 is not None and g3 is not None:
        h2, h3 = lat.invariants()
        if abs(h2 - g2) > 1e-8 * max(1.0, abs(g2)) or abs(h3 - g3) > 1e-8 * max(1.0, abs(g3)):
            raise NumericError("invariants do not match the lattice")
    return lat.wp(omega), lat.wp_prime(omega)


def transformation_sum(lattice: Lattice, w, p: int, axis: str = "real"):
    """``wp(w) + sum_k [wp(w + k h/p) - wp(k h/p)]`` for ``k = 1..p-1``.

    ``h`` is the real period (``axis="real"``) or the imaginary one.  The
    result equals ``wp`` of the lattice whose period ``h`` is divided by ``p``.
    """
    h = lattice.A if axis == "real" else 1j * lattice.B
    w = np.asarray(w, complex)
    total = lattice.wp(w)
    for k in range(1, p):
        total = total + lattice.wp(w + k * h / p) - lattice.wp(k * h / p)
    return total


def addition_formula(lattice: Lattice, w1, w2):
    """Right-hand side of the addition theorem for ``wp(w1 + w2)``."""
    p1, p2 = lattice.wp(w1), lattice.wp(w2)
    d1, d2 = lattice.wp_prime(w1), lattice.wp_prime(w2)
    return -p1 - p2 + 0.25 * ((d1 - d2) / (p1 - p2)) ** 2


# --- Carlson's symmetric integral ------------------------------------------------


def carlson_rf(x, y, z, rtol: float = 1e-3):
    """``R_F(x, y, z)`` for complex arguments by duplication (principal branch).

    Iterates until every argument is within ``rtol`` of the mean, then sums
    the fifth-order Taylor tail, whose error is of order ``rtol**6``.
    """
    x, y, z = np.broadcast_arrays(
        np.asarray(x, complex), np.asarray(y, complex), np.asarray(z, complex)
    )
    x, y, z = x.copy(), y.copy(), z.copy()
    for _ in range(60):
        A = (x + y + z) / 3
        dev = np.max(np.abs(np.stack([x - A, y - A, z - A])), axis=0)
        if np.all(dev <= rtol * np.abs(A)):
            break
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x, y, z = (x + lam) / 4, (y + lam) / 4, (z + lam) / 4
    else:
        raise AccuracyError("Carlson duplication did not converge")
    A = (x + y + z) / 3
    X, Y = 1 - x / A, 1 - y / A
    Z = -(X + Y)
    E2 = X * Y - Z * Z
    E3 = X * Y * Z
    out = (1 - E2 / 10 + E3 / 14 + E2 * E2 / 24 - 3 * E2 * E3 / 44) / np.sqrt(A)
    return out[()] if out.ndim == 0 else out


# --- the uniformization -----------------------------------------------------------

STRIPS = ("cgf", "half", "flipped", "principal")


@dataclass(frozen=True)
class Uniformization:
    kernel: KernelData
    bp: BranchPoints
    omega1: complex
    omega2: float
    omega3: float
    e1: float
    e12: float
    e2: float
    g2: float
    g3: float
    mobius: tuple  # (A, B, C, D): f(t) = (A t + B) / (C t + D)
    y_sign: float  # sign in front of wp' in the formula for y(w)
    error_estimate: float
    lattice: Lattice = field(repr=False)
    lattice13: Lattice = field(repr=False)
    _poly: tuple = field(repr=False)

    @property
    def ratio(self) -> float:
        return self.omega3 / self.omega2

    # Mobius map ----------------------------------------------------------------
    def f(self, t):
        A, B, C, D = self.mobius
        t = np.asarray(t, complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(np.isinf(t), A / C if C else np.inf, (A * t + B) / (C * t + D))
        return out[()] if out.ndim == 0 else out

    def f_prime(self, t):
        A, B, C, D = self.mobius
        t = np.asarray(t, complex)
        return (A * D - B * C) / (C * t + D) ** 2

    def f_inverse(self, v):
        A, B, C, D = self.mobius
        v = np.asarray(v, complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (D * v - B) / (A - C * v)

    # Weierstrass functions -------------------------------------------------------
    def wp(self, w):
        return self.lattice.wp(w)

    def wp_prime(self, w):
        return self.lattice.wp_prime(w)

    def strip(self, hint: str):
        w2, w3 = self.omega2, self.omega3
        return {
            "cgf": (w2 / 2, (w2 + w3) / 2),
            "half": (w2 / 2, w2),
            "flipped": (0.0, w2 / 2),
        }.get(hint)

    def wp_inverse(self, v, hint: str = "half"):
        """A solution of ``wp(w) = v`` reduced to ``[0, omega2) x [0, |omega1|)``
        (``"half"`` uses ``(0, omega2]`` for the real part), with real part in
        the strip selected by ``hint``:

        * ``"cgf"``: ``[omega2/2, (omega2 + omega3)/2]``, the image of the region GX;
        * ``"half"``: ``[omega2/2, omega2]``, always solvable; the CGF built on it
          is meromorphic off ``[x3, x4]``;
        * ``"flipped"``: ``[0, omega2/2]``, the mirror choice (negative control);
        * ``"principal"``: whatever the principal Carlson integral returns.
        """
        if hint not in STRIPS:
            raise ValueError(f"unknown branch hint {hint!r}")
        v = np.asarray(v, complex)
        w0 = carlson_rf(v - self.e1, v - self.e12, v - self.e2)
        w0 = self._polish(w0, v)
        A, B = self.omega2, abs(self.omega1)
        red = lambda w: (w.real % A) + 1j * (w.imag % B)  # noqa: E731
        cand = red(w0)
        if hint == "principal":
            return cand[()] if cand.ndim == 0 else cand
        other = red(-w0)
        lo, hi = self.strip(hint)
        if hint == "half":
            cand = np.where(cand.real == 0, cand + A, cand)
            other = np.where(other.real == 0, other + A, other)
        tol = 1e-9 * A
        ok1 = (cand.real >= lo - tol) & (cand.real <= hi + tol)
        ok2 = (other.real >= lo - tol) & (other.real <= hi + tol)
        if not np.all(ok1 | ok2):
            raise BranchError(f"no representative of wp^-1 in the {hint!r} strip [{lo:.6g}, {hi:.6g}]")
        out = np.where(ok1, cand, other)
        return out[()] if out.ndim == 0 else out

    def _polish(self, w, v):
        w = np.asarray(w, complex)
        scale = 1.0 + np.abs(v)
        for _ in range(3):
            try:
                p = self.wp(w)
                dp = self.wp_prime(w)
            except PoleError:
                break
            res = p - v
            big = np.abs(dp) > 1e-6 * scale ** 1.5
            step = np.where(big, res / np.where(big, dp, 1.0), 0.0)
            w = w - step
            if np.all(np.abs(res) <= 1e-15 * scale):
                break
        return w

    def x_inverse(self, t, hint: str = "half"):
        return self.wp_inverse(self.f(t), hint)

    # the parameterization ----------------------------------------------------------
    def x_of(self, w):
        return self.f_inverse(self.wp(w))

    def uniformize(self, w):
        """``(x(w), y(w))`` on the kernel curve."""
        w = np.asarray(w, complex)
        p = self.wp(w)
        dp = self.wp_prime(w)
        x = self.f_inverse(p)
        a_, b_, _, _ = self.kernel.coeffs("y")
        sq = self.y_sign * self.sqrt_d_factor(p) * dp
        y = (-P.polyval(x, b_) + sq) / (2 * P.polyval(x, a_))
        return x, y

    def sqrt_d_factor(self, p):
        """``s(p)`` with ``d(x(w))^{1/2} = s(wp(w)) * wp'(w)`` up to sign."""
        x4 = self.bp.x[3]
        if math.isinf(x4):
            d3 = self._poly[0][3]
            return np.full_like(np.asarray(p, complex), 1.0 / (2 * d3))
        c0, d1 = self._poly[1]
        return d1 / (2 * (np.asarray(p, complex) - c0) ** 2)

    def psi(self, w):
        """Automorphism fixing x."""
        return -np.asarray(w)

    def phi(self, w):
        """Automorphism fixing y."""
        return self.omega3 - np.asarray(w)

    def as_dict(self) -> dict:
        return {
            "omega1_im": abs(self.omega1),
            "omega2": self.omega2,
            "omega3": self.omega3,
            "ratio": self.ratio,
            "g2": self.g2,
            "g3": self.g3,
            "e": [self.e1, self.e12, self.e2],
            "error_estimate": self.error_estimate,
            "branch_points": {
                "x": [_jsonable(v) for v in self.bp.x],
                "y": [_jsonable(v) for v in self.bp.y],
            },
        }


def _jsonable(v):
    return None if math.isinf(v) else float(v)


def _mobius(d, x4):
    """Coefficients of ``f`` and the auxiliary numbers used by ``y(w)``."""
    if math.isinf(x4):
        d2, d3 = d[2], d[3]
        return (d3, d2 / 3.0, 0.0, 1.0), None
    d1 = P.polyval(x4, P.polyder(d))
    d2 = P.polyval(x4, P.polyder(d, 2))
    c0 = d2 / 6.0
    return (c0, d1 - c0 * x4, 1.0, -x4), (c0, d1)


def _lead_and_roots(d, roots):
    dd = np.trim_zeros(np.asarray(d, float), "b")
    finite = [r for r in roots if math.isfinite(r)]
    return dd[-1], finite


def _segment_integral(lead, roots, lo_idx, hi_idx, tol):
    """``int_{r_lo}^{r_hi} dx / sqrt|d(x)|`` between adjacent simple roots,
    via ``x = r_lo + (r_hi - r_lo) sin^2(th)``."""
    lo, hi = roots[lo_idx], roots[hi_idx]
    rest = [r for i, r in enumerate(roots) if i not in (lo_idx, hi_idx)]

    def g(u):
        th = u * (np.pi / 2)
        x = lo + (hi - lo) * np.sin(th) ** 2
        prod = np.full_like(x, abs(lead))
        for r in rest:
            prod = prod * np.abs(x - r)
        return (np.pi / 2) * 2.0 / np.sqrt(prod)

    # another root close to an endpoint (small z) puts a bump of width
    # ~ sqrt(gap / span) in the substituted variable next to that end
    span = hi - lo
    gap_lo = min((abs(lo - r) for r in rest), default=span)
    gap_hi = min((abs(hi - r) for r in rest), default=span)
    h_lo = math.sqrt(gap_lo / span) / 4
    h_hi = math.sqrt(gap_hi / span) / 4
    return integrate_graded(g, 0.0, 1.0, h_lo, h_hi, tol=tol)


def _arc_integral(lead, roots, x_start, p, tol):
    """``int dx / sqrt(d)`` from ``x_start`` to ``roots[0]`` along the real arc
    avoiding ``(x2, x3)``; ``x = p + 1/xi`` maps it to a finite interval."""
    xi = [1.0 / (r - p) for r in roots]
    if len(roots) == 3:
        xi.append(0.0)  # the root at infinity
    L = abs(lead) * np.prod([abs(p - r) for r in roots])
    xa = 0.0 if math.isinf(x_start) else 1.0 / (x_start - p)
    x1 = xi[0]
    others = xi[1:]
    span = xa - x1

    def g(s):
        u = x1 + span * s * s
        prod = np.full_like(u, L)
        for r in others:
            prod = prod * np.abs(u - r)
        return 2.0 * math.sqrt(abs(span)) / np.sqrt(prod)

    # grade towards roots that crowd either end (small z)
    gap_lo = min((abs(x1 - r) for r in others), default=abs(span)) / abs(span)
    gap_hi = min((abs(xa - r) for r in others), default=abs(span)) / abs(span)
    return integrate_graded(g, 0.0, 1.0, math.sqrt(gap_lo) / 4, gap_hi / 4, tol=tol)


def build_uniformization(kd: KernelData, bp: BranchPoints | None = None,
                         tol: float = 1e-13) -> Uniformization:
    if bp is None:
        bp = branch_points(kd)
    d = np.asarray(kd.d, float)
    x1, x2, x3, x4 = bp.x
    lead, roots = _lead_and_roots(d, bp.x)
    mob, aux = _mobius(d, x4)
    A_, B_, C_, D_ = mob
    fval = lambda t: (A_ * t + B_) / (C_ * t + D_)  # noqa: E731
    e2, e12, e1 = fval(x1), fval(x2), fval(x3)
    if not (e1 < e12 < e2):
        raise NumericError(f"half-period values out of order: {(e1, e12, e2)}")
    if abs(e1 + e12 + e2) > 1e-9 * max(abs(e1), abs(e2)):
        raise NumericError("half-period values do not sum to zero")
    g2 = -4 * (e1 * e12 + e1 * e2 + e12 * e2)
    g3 = 4 * e1 * e12 * e2

    w1, err1 = _segment_integral(lead, roots, 0, 1, tol)
    w2, err2 = _segment_integral(lead, roots, 1, 2, tol)
    omega1 = 1j * float(w1)
    omega2 = float(w2)

    # omega3: from the double point X(y1) of the x-roots to x1 along the arc
    # of the real line that avoids (x2, x3)
    y1 = bp.y[0]
    at = P.polyval(y1, kd.at)
    start = math.inf if at == 0 else -P.polyval(y1, kd.bt) / (2 * at)
    p = math.sqrt(x2 * x3)  # inside (x2, x3); keeps the roots apart in 1/(x - p) for small z
    w3, err3 = _arc_integral(lead, roots, start, p, tol)
    omega3 = float(w3)

    # sign of wp' in y(w): the x4 = inf formula is the limit of the finite one
    y_sign = -1.0 if math.isinf(x4) else 1.0
    u = Uniformization(kd, bp, omega1, omega2, omega3, e1, e12, e2, g2, g3, mob, y_sign,
                       max(err1, err2, err3), Lattice(omega2, abs(omega1)),
                       Lattice(omega3, abs(omega1)), (d, aux))
    defect = _phi_defect(u)
    if defect > 1e-7:
        raise NumericError(f"y(omega3 - w) != y(w): defect {defect:.2e}")
    _check_half_periods(u)
    return u


def _phi_defect(u: Uniformization) -> float:
    rng = np.random.default_rng(11)
    A, B = u.omega2, abs(u.omega1)
    w = rng.uniform(0.1, 0.9, 6) * A + 1j * rng.uniform(0.1, 0.9, 6) * B
    _, y = u.uniformize(w)
    _, y2 = u.uniformize(u.phi(w))
    return float(np.max(np.abs(y - y2) / (1 + np.abs(y))))


def _check_half_periods(u: Uniformization):
    e1, e12, e2 = u.lattice.half_period_values()
    for got, want, name in ((e1, u.e1, "f(x3)"), (e12, u.e12, "f(x2)"), (e2, u.e2, "f(x1)")):
        if abs(got - want) > 1e-8 * max(1.0, abs(want)):
            raise NumericError(f"lattice half-period value {got} does not match {name}={want}")


def half_argument(u_or_lattice, p, e=None):
    """``wp(w/2)`` from ``p = wp(w)`` with positive square roots (real ``w``
    in ``(0, omega2/2]``): ``p + sum over pairs of sqrt((p - ei)(p - ej))``.

    Past ``omega2/2`` the same choice of roots returns ``wp((omega2 - w)/2)``,
    the half-argument closest to the origin."""
    if e is None:
        lat = u_or_lattice if isinstance(u_or_lattice, Lattice) else u_or_lattice.lattice
        e = lat.half_period_values()
    e1, e12, e2 = e
    r = lambda a, b: np.sqrt((p - a) * (p - b) + 0j)  # noqa: E731
    return p + r(e1, e2) + r(e1, e12) + r(e2, e12)
