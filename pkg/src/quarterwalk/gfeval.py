"""Numerical evaluation of the generating functions.

``G_x(x) = c(x) Q(x, 0) - c(0) Q(0, 0)`` is computed inside GX from the
segment integral::

    G_x(x) = x Y0(x) + 1/(2 pi i) * int_{x1}^{x2} t [Y0 - Y1](t) B(t, x) dt,
    B(t, x) = w'(t)/(w(t) - w(x)) - w'(t)/(w(t) - w(0)),

and symmetrically ``G_y`` inside GY with ``X0``, ``X1`` and ``w~``.  The jump
``[Y0 - Y1](t)`` is the boundary value from the upper half-plane,
``i sqrt(-d(t))/a(t)``.  Outside GX the kernel relation
``G_x(x) = x Y0(x) - G_y(Y0(x)) - z delta Q(0, 0)`` continues ``G_x``
whenever ``Y0(x)`` lies in GY.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .cgf import CgfEvaluator, build_cgf, build_closed_form, gluing_residual
from .elliptic import Uniformization, build_uniformization
from .errors import (
    AccuracyError,
    DomainError,
    RegionError,
    SearchError,
    SingularModelError,
)
from .kernel import (
    BranchPoints,
    KernelData,
    branch_points,
    branch_roots,
    build_kernel,
    region_contains,
    sample_critical_curve,
)
from .quadrature import integrate
from .stepset import StepSet, is_singular, parse_step_set

METHODS = ("integral", "singular-series", "functional-equation")
QUAD_TOL = 1e-10  # absolute; base-point rounding noise grows with the degree


@dataclass(frozen=True)
class GFValue:
    value: complex
    error_estimate: float
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.error_estimate >= 0:
            raise ValueError("error estimate must be nonnegative")

    def as_dict(self) -> dict:
        v = complex(self.value)
        return {"re": v.real, "im": v.imag, "error_estimate": self.error_estimate,
                "method": self.method}


@dataclass(frozen=True)
class Pipeline:
    """Everything needed to evaluate one model at one ``z``; immutable.

    ``cut`` selects the boundary value of the square root in the jump
    ``[Y0 - Y1]``; only ``"upper"`` is correct, ``"lower"`` exists as a
    negative control.
    """

    steps: StepSet
    z: float
    kernel: KernelData
    bp: BranchPoints
    u: Uniformization
    cgf: CgfEvaluator
    cut: str = "upper"

    @property
    def delta(self) -> int:
        return self.steps.delta


def build_pipeline(s, z: float, cgf: str = "general", hint: str = "half",
                   cut: str = "upper") -> Pipeline:
    """``cgf`` is ``"general"`` (elliptic formula) or ``"closed"`` (the
    family closed form when one exists)."""
    s = parse_step_set(s)
    if is_singular(s):
        raise SingularModelError("singular model: use eval_singular_boundary")
    if cut not in ("upper", "lower"):
        raise ValueError("cut must be 'upper' or 'lower'")
    kd = build_kernel(s, z)
    bp = branch_points(kd)
    u = build_uniformization(kd, bp)
    if cgf == "general":
        ev = build_cgf(u, hint)
    elif cgf == "closed":
        ev = build_closed_form(s, u)
    else:
        raise ValueError(f"unknown cgf kind {cgf!r}")
    return Pipeline(s, float(z), kd, bp, u, ev, cut)


# --- the segment integral ---------------------------------------------------------------


def _side_data(ctx: Pipeline, side: str):
    """Branch points, kernel coefficients and CGF accessors for one side."""
    ev = ctx.cgf
    if side == "x":
        pts = ctx.bp.x
        a, b, c, d = ctx.kernel.coeffs("y")
        return pts, a, d, ev.w_dw, ev.w, "y"
    pts = ctx.bp.y
    a, b, c, d = ctx.kernel.coeffs("x")
    wdw = lambda t: ev.wt_dwt(t, cut="upper")  # noqa: E731
    return pts, a, d, wdw, ev.w_tilde, "x"


def _lead(d):
    deg = 4 if d[4] != 0 else 3
    return d[deg]


def _integral(ctx: Pipeline, side: str, points: np.ndarray):
    pts, a, d, wdw, wfun, root_side = _side_data(ctx, side)
    p1, p2, p3, p4 = pts
    lead = _lead(d)
    span = p2 - p1
    points = np.asarray(points, complex)
    wx = np.asarray(wfun(points), complex).reshape(-1, 1)
    w0 = complex(np.asarray(wfun(np.array([0.0 + 0j])))[0])
    sgn = 1.0 if ctx.cut == "upper" else -1.0

    def integrand(theta):
        s, c = np.sin(theta), np.cos(theta)
        t = p1 + span * s * s
        rest = lead * (t - p3)
        if not math.isinf(p4):
            rest = rest * (t - p4)
        # sqrt(-d(t)) = span * sin * cos * sqrt(rest); dt = 2 span sin cos dtheta
        jump_dt = sgn * 1j * np.sqrt(np.abs(rest)) * 2 * (span * s * c) ** 2 / P.polyval(t, a)
        wt, dwt = wdw(t.astype(complex))
        br = dwt * (wx - w0) / ((wt - wx) * (wt - w0))
        return t * jump_dt * br

    val, err = integrate(integrand, 0.0, math.pi / 2, tol=QUAD_TOL, n0=16, n_max=4096)
    roots0 = branch_roots(ctx.kernel, root_side, points)[0]
    lead_term = points * roots0
    return lead_term + val / (2j * math.pi), err / (2 * math.pi)


def _on_segment(t: complex, lo: float, hi: float) -> bool:
    return abs(t.imag) <= 1e-12 * (1 + abs(t.real)) and lo <= t.real <= hi


def _inside(ctx: Pipeline, region: str, t: complex) -> bool:
    """Winding test; points numerically on the curve count as inside, since
    the integral representation extends continuously to the boundary."""
    try:
        return bool(region_contains(ctx.kernel, region, t, ctx.bp))
    except RegionError:
        return True


def _norm_side(side: str) -> str:
    side = side.replace("-side", "")
    if side not in ("x", "y"):
        raise ValueError("side must be 'x' or 'y'")
    return side


def boundary_values(side: str, points, ctx: Pipeline, q00=None, continuation=True):
    """Vectorised ``G_x`` (or ``G_y``); returns ``(values, errors, methods)``."""
    side = _norm_side(side)
    other = "y" if side == "x" else "x"
    region, other_region = ("GX", "GY") if side == "x" else ("GY", "GX")
    lo, hi = (ctx.bp.x if side == "x" else ctx.bp.y)[:2]
    pts = np.atleast_1d(np.asarray(points, complex))
    vals = np.zeros(pts.shape, complex)
    errs = np.zeros(pts.shape)
    methods = ["integral"] * len(pts)
    direct, cont = [], []
    for i, t in enumerate(pts):
        if t == 0:
            continue
        if _on_segment(t, lo, hi):
            raise DomainError(f"{t} lies on the cut [{lo}, {hi}]")
        if _inside(ctx, region, t):
            direct.append(i)
        elif continuation:
            cont.append(i)
        else:
            raise DomainError(f"{t} is outside {region} (winding test)")
    if direct:
        v, e = _integral(ctx, side, pts[direct])
        vals[direct], errs[direct] = v, e
    if cont:
        cp = pts[cont]
        partner = branch_roots(ctx.kernel, other, cp)[0]
        for t, q in zip(cp, partner):
            if not np.isfinite(q) or not _inside(ctx, other_region, q):
                raise DomainError(
                    f"{t} is outside {region} and its kernel partner {q} is outside "
                    f"{other_region}; no evaluable representation")
        gv, ge, _ = boundary_values(other, partner, ctx, continuation=False)
        corr, cerr = 0.0, 0.0
        if ctx.delta:
            if q00 is None:
                q00 = eval_q00(ctx)
            corr, cerr = ctx.z * q00.value, ctx.z * q00.error_estimate
        vals[cont] = cp * partner - gv - corr
        errs[cont] = ge + cerr
        for i in cont:
            methods[i] = "functional-equation"
    errs = errs + 1e-14 * (1 + np.abs(vals))
    return vals, errs, methods


def eval_boundary_gf(side: str, point, ctx: Pipeline, q00=None,
                     continuation: bool = True) -> GFValue:
    """``c(x)Q(x,0) - c(0)Q(0,0)`` (``side="x"``) or the y-side analogue."""
    v, e, m = boundary_values(side, [point], ctx, q00, continuation)
    return GFValue(complex(v[0]), float(e[0]), m[0])


# --- Q(0, 0) ----------------------------------------------------------------------------


def admissible_pairs(ctx: Pipeline, n_grid: int = 41):
    """Real kernel zeros ``(x0, Y0(x0))`` with ``x0`` in ``(x2, min(1, x3))``,
    ``|y0| <= 1`` and both points inside their regions, in grid order."""
    x2, x3 = ctx.bp.x[1], ctx.bp.x[2]
    hi = min(1.0, x3)
    out = []
    for x0 in np.linspace(x2, hi, n_grid + 2)[1:-1]:
        y0 = complex(branch_roots(ctx.kernel, "y", x0)[0])
        if abs(y0.imag) > 1e-12 or abs(y0) > 1:
            continue
        try:
            ok = region_contains(ctx.kernel, "GX", x0, ctx.bp) and region_contains(
                ctx.kernel, "GY", y0.real, ctx.bp)
        except RegionError:
            continue
        if ok:
            out.append((float(x0), y0.real))
    return out


def eval_q00(ctx: Pipeline, which: int = 0) -> GFValue:
    """``Q(0,0;z)``.

    With SW in the step set the kernel relation at an admissible zero
    ``(x0, y0)`` gives ``z Q(0,0) = x0 y0 - G_x(x0) - G_y(y0)``; ``which``
    picks the pair.  Otherwise ``Q(0,0)`` is the mean of ``Q(x,0) =
    G_x(x)/c(x)`` over a circle around the origin.
    """
    z = ctx.z
    if ctx.delta:
        pairs = admissible_pairs(ctx)
        if len(pairs) <= which:
            raise SearchError(
                f"found {len(pairs)} admissible kernel zeros in "
                f"({ctx.bp.x[1]:.6g}, {min(1.0, ctx.bp.x[2]):.6g}); need {which + 1}")
        x0, y0 = pairs[which]
        gx = eval_boundary_gf("x", x0, ctx, continuation=False)
        gy = eval_boundary_gf("y", y0, ctx, continuation=False)
        val = (x0 * y0 - gx.value - gy.value) / z
        return GFValue(val, (gx.error_estimate + gy.error_estimate) / z, "integral")
    return _q00_circle(ctx)


def _circle_radii(ctx: Pipeline):
    x1, x2 = ctx.bp.x[:2]
    radii = [(x2 + 1) / 2, x2 + 0.25 * (1 - x2), x2 + 0.75 * (1 - x2)]
    if x1 > 0:
        radii.append(x1 / 2)
    return radii


def _q00_circle(ctx: Pipeline, tol: float = 1e-12) -> GFValue:
    c = ctx.kernel.c
    last_error = None
    for r in _circle_radii(ctx):
        try:
            prev, m = None, 16
            while m <= 512:
                pts = r * np.exp(2j * math.pi * (np.arange(m) + 0.5) / m)
                v, e, methods = boundary_values("x", pts, ctx)
                q = v / P.polyval(pts, c)
                cur = q.mean()
                if prev is not None and abs(cur - prev) < tol * max(1.0, abs(cur)):
                    err = abs(cur - prev) + float(np.max(e / np.abs(P.polyval(pts, c))))
                    method = "integral" if all(x == "integral" for x in methods) \
                        else "functional-equation"
                    return GFValue(complex(cur), err, method)
                prev, m = cur, 2 * m
            raise AccuracyError("circle mean did not converge", estimate=abs(cur - prev))
        except DomainError as exc:
            last_error = exc
    raise SearchError(f"no evaluable circle around 0 for Q(0,0): {last_error}")


# --- Q(x, y) ----------------------------------------------------------------------------


def eval_q(x, y, ctx: Pipeline, q00: GFValue | None = None) -> GFValue:
    """``Q(x,y;z) = [c(x)Q(x,0) + c~(y)Q(0,y) - z delta Q(0,0) - xy] / K(x,y)``."""
    x, y = complex(x), complex(y)
    kd = ctx.kernel
    if q00 is None:
        q00 = eval_q00(ctx)
    if x == 0 and y == 0:
        return q00
    K = kd.value(x, y)
    scale = abs(x * y) + abs(P.polyval(x, kd.a)) * abs(y) ** 2 + abs(P.polyval(x, kd.c)) + 1e-300
    if abs(K) <= 1e-12 * scale:
        raise DomainError(f"kernel vanishes at ({x}, {y}): removable singularity, perturb the point")
    gx = eval_boundary_gf("x", x, ctx, q00=q00)
    gy = eval_boundary_gf("y", y, ctx, q00=q00)
    zq = ctx.z * ctx.delta
    num = gx.value + gy.value + zq * q00.value - x * y
    err = (gx.error_estimate + gy.error_estimate + zq * q00.error_estimate) / abs(K)
    method = "integral" if gx.method == gy.method == q00.method == "integral" \
        else "functional-equation"
    return GFValue(num / K, err, method)


def eval_q_axis(side: str, point, ctx: Pipeline, q00: GFValue | None = None) -> GFValue:
    """``Q(x,0)`` (``side="x"``) or ``Q(0,y)`` by dividing out ``c`` or ``c~``."""
    side = _norm_side(side)
    point = complex(point)
    if q00 is None:
        q00 = eval_q00(ctx)
    if point == 0:
        return q00
    g = eval_boundary_gf(side, point, ctx, q00=q00)
    cpoly = ctx.kernel.c if side == "x" else ctx.kernel.ct
    cv = P.polyval(point, cpoly)
    zq = ctx.z * ctx.delta
    return GFValue((g.value + zq * q00.value) / cv,
                   (g.error_estimate + zq * q00.error_estimate) / abs(cv), g.method)


# --- singular models ---------------------------------------------------------------------


def singular_iterates(kd: KernelData, x, side: str = "x", tol: float = 1e-14,
                      max_iter: int = 100000):
    """Iterates ``u_{p+1} = X0(Y0(u_p))`` (``side="x"``) and the series terms
    ``Y0(u_p)(u_p - u_{p+1})``; stops when a term is below ``tol``."""
    first, second = ("y", "x") if side == "x" else ("x", "y")
    u = complex(x)
    us, terms = [u], []
    for _ in range(max_iter):
        v = complex(branch_roots(kd, first, u)[0])
        nxt = complex(branch_roots(kd, second, v)[0])
        term = v * (u - nxt)
        terms.append(term)
        us.append(nxt)
        if abs(term) < tol:
            return np.array(us), np.array(terms)
        u = nxt
    raise AccuracyError("singular series did not reach its tolerance", estimate=abs(terms[-1]))


def _singular_series(kd, x, side):
    _, terms = singular_iterates(kd, x, side)
    total = math.fsum(terms.real) + 1j * math.fsum(terms.imag)
    z = kd.z
    val = total / (z * x * x)
    err = (abs(terms[-1]) + 1e-15 * np.sum(np.abs(terms))) / abs(z * x * x)
    return val, err


def eval_singular_boundary(x, s, z: float, side: str = "x") -> GFValue:
    """``Q(x,0;z)`` (or ``Q(0,y;z)``) of a singular model from the iterated
    kernel series ``(1/(z x^2)) sum_p Y0(u_p)(u_p - u_{p+1})``.

    ``z = 1/k`` is admitted: the series still converges there.  At ``x = 0``
    the value is the mean over the circle ``|x| = 1/2``.
    """
    s = parse_step_set(s)
    if not is_singular(s):
        raise DomainError("non-singular model: use the integral pipeline")
    side = _norm_side(side)
    x = complex(x)
    if not abs(x) < 1:
        raise DomainError("the singular series needs |x| < 1")
    kd = build_kernel(s, z, allow_boundary=True)
    if x != 0:
        val, err = _singular_series(kd, x, side)
        return GFValue(complex(val), float(err), "singular-series")
    prev, m = None, 8
    while m <= 256:
        pts = 0.5 * np.exp(2j * math.pi * (np.arange(m) + 0.5) / m)
        vals = [_singular_series(kd, p, side) for p in pts]
        cur = np.mean([v for v, _ in vals])
        if prev is not None and abs(cur - prev) < 1e-13:
            return GFValue(complex(cur), abs(cur - prev) + max(e for _, e in vals),
                           "singular-series")
        prev, m = cur, 2 * m
    raise AccuracyError("circle mean did not converge", estimate=abs(cur - prev))


def eval_singular_q(x, y, s, z: float) -> GFValue:
    """``Q(x,y;z)`` of a singular model from the two boundary series.

    All five singular models lack SW, so the kernel relation reads
    ``K Q = c(x) Q(x,0) + c~(y) Q(0,y) - xy``.
    """
    s = parse_step_set(s)
    x, y = complex(x), complex(y)
    qx = eval_singular_boundary(x, s, z, "x")
    if x == 0 and y == 0:
        return qx
    qy = eval_singular_boundary(y, s, z, "y")
    if y == 0:
        return qx
    if x == 0:
        return qy
    kd = build_kernel(s, z, allow_boundary=True)
    K = kd.value(x, y)
    if abs(K) <= 1e-12 * (abs(x * y) + 1e-300):
        raise DomainError(f"kernel vanishes at ({x}, {y}): removable singularity, perturb the point")
    cx, cy = P.polyval(x, kd.c), P.polyval(y, kd.ct)
    val = (cx * qx.value + cy * qy.value - x * y) / K
    err = (abs(cx) * qx.error_estimate + abs(cy) * qy.error_estimate) / abs(K)
    return GFValue(val, err, "singular-series")


# --- diagnostics -------------------------------------------------------------------------


def bvp_residual(ctx: Pipeline, n: int = 32) -> float:
    """``max |G_x(t) - G_x(conj t) - (t Y0(t) - conj(t) Y0(conj t))|`` on X([y1, y2])."""
    pts = sample_critical_curve(ctx.kernel, "x", n, ctx.bp)
    pts = pts[np.isfinite(pts) & (pts.imag > 1e-9 * (1 + np.abs(pts)))]
    both = np.concatenate([pts, np.conj(pts)])
    g, _, _ = boundary_values("x", both, ctx, continuation=False)
    y0 = branch_roots(ctx.kernel, "y", both)[0]
    m = len(pts)
    lhs = g[:m] - g[m:]
    rhs = both[:m] * y0[:m] - both[m:] * y0[m:]
    return float(np.max(np.abs(lhs - rhs)))


def kernel_residual(ctx: Pipeline, n: int = 32, seed: int = 3) -> float:
    """Relative ``|K(x(w), y(w))|`` at random points of the period rectangle."""
    u = ctx.u
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.05, 0.95, n) * u.omega2 + 1j * rng.uniform(0.05, 0.95, n) * abs(u.omega1)
    x, y = u.uniformize(w)
    kd = ctx.kernel
    ok = np.isfinite(x) & np.isfinite(y)
    x, y = x[ok], y[ok]
    scale = (np.abs(P.polyval(x, kd.a)) * np.abs(y) ** 2 + np.abs(P.polyval(x, kd.b) * y)
             + np.abs(P.polyval(x, kd.c)))
    return float(np.max(np.abs(kd.value(x, y)) / scale))


def functional_equation_residual(ctx: Pipeline, x, y, q00=None) -> float:
    """``|K Q(x,y) - [c Q(x,0) + c~ Q(0,y) - z delta Q(0,0) - xy]|`` with every
    piece evaluated through its own call."""
    kd = ctx.kernel
    q00 = q00 or eval_q00(ctx)
    q = eval_q(x, y, ctx, q00).value
    qx = eval_q_axis("x", x, ctx, q00).value
    qy = eval_q_axis("y", y, ctx, q00).value
    rhs = (P.polyval(x, kd.c) * qx + P.polyval(y, kd.ct) * qy
           - ctx.z * ctx.delta * q00.value - x * y)
    return float(abs(kd.value(x, y) * q - rhs))


def residual_report(ctx: Pipeline, n: int = 32, point=(0.3, 0.4)) -> dict:
    """Maxima of the boundary-condition, gluing, kernel and functional-equation residuals."""
    return {
        "bvp": bvp_residual(ctx, n),
        "gluing": gluing_residual(ctx.cgf, n),
        "kernel": kernel_residual(ctx, n),
        "functional_equation": functional_equation_residual(ctx, *point),
    }
