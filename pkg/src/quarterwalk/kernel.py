"""The kernel polynomial, its discriminants and branch points, the algebraic
branches ``X0, X1, Y0, Y1`` and the regions bounded by the critical curves.

For fixed ``z`` the kernel

    K(x, y) = x y z [ sum_{(i,j) in S} x^i y^j - 1/z ]

is quadratic in each variable::

    K = a(x) y^2 + b(x) y + c(x) = at(y) x^2 + bt(y) x + ct(y).

Polynomials are stored as numpy coefficient arrays in increasing degree.
The ``t`` suffix ("tilde") marks the objects attached to the other variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    DegenerateModelError,
    DomainError,
    NumericError,
    RegionError,
    SingularModelError,
)
from .stepset import COMPASS, StepSet, is_singular, parse_step_set

INF = math.inf


def _side_coefficients(s: StepSet, z: float):
    """(a, b, c) for the kernel read as a quadratic in y, coefficients in x."""
    a = z * np.array(s.coefficients("x", 1), float)
    b = z * np.array(s.coefficients("x", 0), float)
    b[1] -= 1.0
    c = z * np.array(s.coefficients("x", -1), float)
    return a, b, c


@dataclass(frozen=True)
class KernelData:
    steps: StepSet
    z: float
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    at: np.ndarray
    bt: np.ndarray
    ct: np.ndarray
    d: np.ndarray = field(repr=False)
    dt: np.ndarray = field(repr=False)

    @property
    def singular(self) -> bool:
        return is_singular(self.steps)

    def coeffs(self, side: str):
        """``(a, b, c, d)`` for roots in y (``side="y"``) or in x (``side="x"``)."""
        if side == "y":
            return self.a, self.b, self.c, self.d
        if side == "x":
            return self.at, self.bt, self.ct, self.dt
        raise ValueError(f"side must be 'x' or 'y', not {side!r}")

    def reflected(self) -> "KernelData":
        return build_kernel(self.steps.reflect(), self.z)

    def value(self, x, y):
        """``a(x) y^2 + b(x) y + c(x)``; polynomial, so fine at ``x = 0`` or ``y = 0``."""
        return P.polyval(x, self.a) * y * y + P.polyval(x, self.b) * y + P.polyval(x, self.c)


def build_kernel(s, z: float, allow_boundary: bool = False) -> KernelData:
    """Kernel coefficients at ``z``.  ``allow_boundary`` admits ``z = 1/k``,
    which only the singular series uses (it still converges there)."""
    s = parse_step_set(s)
    z = float(z)
    ok = 0.0 < z <= 1.0 / s.k if allow_boundary else 0.0 < z < 1.0 / s.k
    if not ok:
        raise DomainError(f"z={z} outside (0, 1/{s.k})")
    a, b, c = _side_coefficients(s, z)
    at, bt, ct = _side_coefficients(s.reflect(), z)
    d = P.polysub(P.polymul(b, b), 4.0 * P.polymul(a, c))
    dt = P.polysub(P.polymul(bt, bt), 4.0 * P.polymul(at, ct))
    kd = KernelData(s, z, a, b, c, at, bt, ct, _pad(d, 5), _pad(dt, 5))
    _check_identity(kd)
    return kd


def _pad(p, n):
    out = np.zeros(n)
    out[: len(p)] = p
    return out


def _check_identity(kd: KernelData):
    rng = np.random.default_rng(7)
    pts = rng.normal(size=(6, 2)) + 1j * rng.normal(size=(6, 2))
    for x, y in pts:
        lhs = kd.value(x, y)
        rhs = kernel_value(kd.steps, x, y, kd.z)
        scale = 1.0 + abs(x * y) * (1 + abs(x) + abs(y)) ** 2
        if abs(lhs - rhs) > 1e-12 * scale:
            raise NumericError("kernel coefficients disagree with the kernel")
    # the other reading of the same polynomial
    for x, y in pts:
        other = (
            P.polyval(y, kd.at) * x * x + P.polyval(y, kd.bt) * x + P.polyval(y, kd.ct)
        )
        if abs(other - kd.value(x, y)) > 1e-12 * (1 + abs(x * y)) ** 3:
            raise NumericError("x- and y-readings of the kernel disagree")


def kernel_value(s, x, y, z: float):
    """``x y z [sum x^i y^j - 1/z]`` evaluated from the Laurent form."""
    s = parse_step_set(s)
    x = np.asarray(x, complex)
    y = np.asarray(y, complex)
    if np.any(x == 0) or np.any(y == 0):
        raise DomainError("kernel_value needs x != 0 and y != 0")
    tot = sum(x**i * y**j for i, j in s.steps)
    out = x * y * z * (tot - 1.0 / z)
    return out[()] if out.ndim == 0 else out


# --- branch points ------------------------------------------------------------


@dataclass(frozen=True)
class BranchPoints:
    x: tuple  # (x1, x2, x3, x4); x4 may be inf
    y: tuple

    def side(self, side: str) -> tuple:
        """Branch points of the roots in ``side`` (``"y"`` roots branch at the x-points)."""
        return self.x if side == "y" else self.y


def _polish(coeffs, roots, dps=40):
    """Newton-polish numpy roots of a real polynomial in extended precision."""
    with mpmath.workdps(dps):
        cs = [mpmath.mpf(float(v)) for v in coeffs[::-1]]  # highest degree first
        out = []
        for r in roots:
            x = mpmath.mpc(r)
            for _ in range(8):
                p, dp = mpmath.polyval(cs, x, derivative=True)
                if dp == 0:
                    break
                step = p / dp
                x -= step
                if abs(step) <= mpmath.mpf(10) ** (-dps + 5) * (1 + abs(x)):
                    break
            out.append(x)
        return out


def discriminant_roots(d: np.ndarray):
    """Real roots of a discriminant polynomial in modulus order, ``inf`` padded.

    Raises DegenerateModelError when the degree is below 3 or roots collide,
    since the kernel curve then has genus 0 and the elliptic pipeline does
    not apply.
    """
    d = np.trim_zeros(np.asarray(d, float), "b")
    deg = len(d) - 1
    if deg < 3:
        raise DegenerateModelError(f"discriminant has degree {deg} < 3 (genus-0 kernel)")
    raw = np.roots(d[::-1])
    pol = _polish(d, raw)
    roots = []
    for r in pol:
        if abs(r.imag) > 1e-9 * (1 + abs(r)):
            raise NumericError(f"non-real branch point {complex(r)}")
        roots.append(float(r.real))
    for i, u in enumerate(roots):
        for v in roots[i + 1:]:
            if abs(u - v) <= 1e-9 * (1 + abs(u)):
                raise DegenerateModelError("discriminant has a repeated root (genus-0 kernel)")
    # modulus order; a tie |p1| = p2 (models with d even in x) puts the
    # positive root second, and a tie among the outer pair puts it third
    roots.sort(key=lambda r: (round(abs(r), 12), r <= 0 if abs(r) > 1 else r > 0))
    if deg == 3:
        roots.append(INF)
    return tuple(roots)


def branch_points(kd: KernelData) -> BranchPoints:
    if kd.singular:
        raise SingularModelError("branch points degenerate; use singular pipeline")
    if kd.steps.degenerate:
        raise DegenerateModelError(f"degenerate model: {kd.steps.degenerate_reason}")
    xs = discriminant_roots(kd.d)
    ys = discriminant_roots(kd.dt)
    for name, (p1, p2, p3, p4) in (("x", xs), ("y", ys)):
        if not (abs(p1) <= p2 < 1.0 < p3 <= abs(p4)):
            raise NumericError(f"{name}-branch points violate |p1| < p2 < 1 < p3 < |p4|: {(p1, p2, p3, p4)}")
    return BranchPoints(xs, ys)


# --- algebraic branches ---------------------------------------------------------


def _on_cut(d_val, t):
    return np.isreal(t) & (np.real(d_val) < 0)


def branch_roots(kd: KernelData, side: str, t, cut=None):
    """The two roots of the kernel in ``side`` at the other variable equal to ``t``.

    ``side="y"`` returns ``(Y0(t), Y1(t))``, ``side="x"`` returns ``(X0(t), X1(t))``,
    with ``|root0| <= |root1|``.  On a cut (real ``t`` where the discriminant
    is negative) the two roots have equal modulus; pass ``cut="upper"`` or
    ``cut="lower"`` to take the boundary values with square root
    ``+i sqrt(-d)`` or ``-i sqrt(-d)``.  Where the leading coefficient
    vanishes the finite root is ``root0`` and ``root1`` is infinite.
    """
    a_, b_, c_, d_ = kd.coeffs(side)
    t = np.asarray(t, complex)
    av = P.polyval(t, a_)
    bv = P.polyval(t, b_)
    cv = P.polyval(t, c_)
    dv = P.polyval(t, d_)
    with np.errstate(divide="ignore", invalid="ignore"):
        sq = np.sqrt(dv)
        if cut is not None:
            if cut not in ("upper", "lower"):
                raise ValueError("cut must be 'upper' or 'lower'")
            oncut = _on_cut(dv, t)
            sgn = 1.0 if cut == "upper" else -1.0
            sq = np.where(oncut, sgn * 1j * np.sqrt(np.abs(dv.real)), sq)
        # stable quadratic formula: q = -(b + sgn(b) sq)/2, roots q/a and c/q
        rp = (-bv + sq) / (2 * av)
        rm = (-bv - sq) / (2 * av)
        # cancellation guard: recompute the small root from Vieta
        alt_p = 2 * cv / (-bv - sq)
        alt_m = 2 * cv / (-bv + sq)
        rp = np.where(np.abs(-bv + sq) < np.abs(-bv - sq), alt_p, rp)
        rm = np.where(np.abs(-bv - sq) < np.abs(-bv + sq), alt_m, rm)
        lead0 = av == 0
        finite = np.where(bv != 0, -cv / bv, np.inf)
        if cut is None:
            swap = np.abs(rp) > np.abs(rm)
            r0 = np.where(swap, rm, rp)
            r1 = np.where(swap, rp, rm)
        else:
            oncut = _on_cut(dv, t)
            swap = ~oncut & (np.abs(rp) > np.abs(rm))
            r0 = np.where(swap, rm, rp)
            r1 = np.where(swap, rp, rm)
        r0 = np.where(lead0, finite, r0)
        r1 = np.where(lead0, np.inf + 0j, r1)
    if r0.ndim == 0:
        return complex(r0), complex(r1)
    return r0, r1


def Y0(kd, x, cut=None):
    return branch_roots(kd, "y", x, cut)[0]


def X0(kd, y, cut=None):
    return branch_roots(kd, "x", y, cut)[0]


def root_derivative(kd: KernelData, side: str, t, r):
    """d(root)/dt along the kernel curve, ``-K_t / K_root`` (nan at an infinite root)."""
    a_, b_, c_, _ = kd.coeffs(side)
    da, db, dc = P.polyder(a_), P.polyder(b_), P.polyder(c_)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        num = P.polyval(t, da) * r * r + P.polyval(t, db) * r + P.polyval(t, dc)
        den = 2 * P.polyval(t, a_) * r + P.polyval(t, b_)
        return -num / den


# --- critical curves and regions ------------------------------------------------


def _curve_params(n):
    """Midpoint angles in (0, 2 pi): first half for the +i branch."""
    th = (np.arange(n) + 0.5) * (2 * np.pi / n)
    return th


def sample_critical_curve(kd: KernelData, side: str, n: int = 128, bp: BranchPoints | None = None):
    """``n`` points on X([y1, y2]) (``side="x"``) or Y([x1, x2]) (``side="y"``).

    The segment is traversed with ``s = p1 + (p2 - p1)(1 - cos th)/2``; for
    ``th`` in (0, pi) the root with ``+i sqrt(-d)`` is taken and for
    ``th`` in (pi, 2 pi) its conjugate, so the list runs once around the
    closed curve and is closed under conjugation.
    """
    if n < 8:
        raise DomainError("need at least 8 curve samples")
    if bp is None:
        bp = branch_points(kd)
    p1, p2 = bp.side(side)[:2]
    th = _curve_params(n)
    s = p1 + (p2 - p1) * (1 - np.cos(th)) / 2
    r0, _ = branch_roots(kd, side, s, cut="upper")
    return np.where(th < np.pi, r0, np.conj(r0))


def _winding(pts, w):
    """Winding number of the closed polyline ``pts`` around ``w``; also the
    largest single-step angle, used to decide whether to refine."""
    v = pts - w
    ang = np.angle(np.roll(v, -1) / v)
    return int(round(ang.sum() / (2 * np.pi))), float(np.max(np.abs(ang)))


def region_contains(kd: KernelData, side: str, t, bp: BranchPoints | None = None,
                    tol: float = 1e-9) -> bool:
    """Is ``t`` in the component of the complement of the critical curve
    containing ``x1`` (``side="GX"``) or ``y1`` (``side="GY"``)?

    The curve can pass through infinity, so the test runs on the image under
    the Mobius map ``m(u) = 1/(u - p3)``; ``p3`` lies outside the region, so
    the region becomes the bounded inside of the image curve.
    """
    if bp is None:
        bp = branch_points(kd)
    curve_side = {"GX": "x", "GY": "y"}.get(side)
    if curve_side is None:
        raise ValueError("side must be 'GX' or 'GY'")
    p = bp.x if side == "GX" else bp.y
    t = complex(t)
    if t == p[0]:
        return True
    if t.imag == 0 and (p[2] <= t.real <= p[3] if p[3] > 0 else (t.real >= p[2] or t.real <= p[3])):
        return False
    if not math.isfinite(abs(t)):
        m_t = 0.0
    else:
        if t == p[2]:
            return False
        m_t = 1.0 / (t - p[2])
    n = 256
    prev = None
    while True:
        pts = sample_critical_curve(kd, curve_side, n, bp)
        mp = 1.0 / (pts - p[2])
        wind, step = _winding(mp, m_t)
        if prev is not None and wind == prev and step < np.pi / 4:
            break
        prev = wind
        n *= 2
        if n > 1 << 17:
            raise RegionError(f"point {t} too close to the critical curve to decide")
    if math.isfinite(abs(t)):
        dist = np.min(np.abs(pts - t))
        seg = np.max(np.abs(np.diff(pts[np.isfinite(pts)]))) if len(pts) > 1 else 0.0
        if dist < tol or (dist < seg and _near_polyline(pts, t) < tol):
            raise RegionError(f"point {t} within {tol} of the critical curve")
    return wind != 0


def _near_polyline(pts, t):
    a = pts
    b = np.roll(pts, -1)
    ab = b - a
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.clip(((t - a) * np.conj(ab)).real / np.abs(ab) ** 2, 0, 1)
    proj = a + u * ab
    return float(np.nanmin(np.abs(proj - t)))


__all__ = [
    "KernelData",
    "BranchPoints",
    "build_kernel",
    "kernel_value",
    "branch_points",
    "discriminant_roots",
    "branch_roots",
    "root_derivative",
    "Y0",
    "X0",
    "sample_critical_curve",
    "region_contains",
    "COMPASS",
]
