"""Command-line frontend: ``python3 -m quarterwalk <command> --steps ...``.

Exit codes: 0 success, 1 usage/parse/domain errors, 2 validation failure,
3 numeric failure (quadrature, branch selection, accuracy).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import cgf as cgf_mod
from . import gfeval, oracle
from .errors import NumericError, WalkError
from .elliptic import build_uniformization
from .kernel import branch_points, build_kernel
from .stepset import StepSet, classify, is_singular, parse_step_set

TEST_POINTS = ((0.0, 0.0), (0.3, 0.4), (0.5, 0.5))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise UsageError(message)


def parse_complex(text: str) -> complex:
    """``"re"`` or ``"re,im"``."""
    parts = [p.strip() for p in str(text).split(",")]
    if not 1 <= len(parts) <= 2:
        raise UsageError(f"expected re[,im], got {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"expected re[,im], got {text!r}") from None
    return complex(vals[0], vals[1] if len(vals) == 2 else 0.0)


@dataclass(frozen=True)
class RunConfig:
    steps: StepSet
    z: float
    x: complex
    y: complex
    n_max: int
    tol: float
    precision: int | None
    output: str

    def __post_init__(self):
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        bound = 1.0 / self.steps.k
        # the singular series still converges at z = 1/k
        ok = 0 < self.z <= bound if is_singular(self.steps) else 0 < self.z < bound
        if not ok:
            raise UsageError(f"--z must lie in (0, 1/{self.steps.k})")


def _config(args) -> RunConfig:
    steps = parse_step_set(args.steps)
    z = args.z if args.z is not None else 1.0 / (2 * steps.k)
    return RunConfig(steps, z, parse_complex(args.x), parse_complex(args.y), args.n,
                     args.tol, args.precision, args.output)


# --- output --------------------------------------------------------------------------------


def _num(v, precision):
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return {"re": _num(v.real, precision), "im": _num(v.imag, precision)}
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v) or math.isnan(v):
            return None
        return float(f"{v:.{precision}g}") if precision else v
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return _num(v.tolist(), precision)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, dict):
        return {k: _num(x, precision) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_num(x, precision) for x in v]
    return v


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}." if not isinstance(v, (int, float, str, bool, type(None))) else f"{prefix}{k}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}." if isinstance(v, (dict, list)) else f"{prefix}{i}")
    else:
        yield prefix.rstrip("."), obj


def emit(obj, cfg: RunConfig, out=None):
    out = out or sys.stdout
    obj = _num(obj, cfg.precision)
    if cfg.output == "json":
        out.write(json.dumps(obj, indent=2, sort_keys=False) + "\n")
    elif cfg.output == "csv":
        out.write("key,value\n")
        for k, v in _flatten(obj):
            out.write(f"{k},{v}\n")
    else:
        for k, v in _flatten(obj):
            out.write(f"{k}: {v}\n")


# --- commands --------------------------------------------------------------------------------


def cmd_classify(cfg, args):
    emit(classify(cfg.steps).as_dict(), cfg)
    return 0


def cmd_count(cfg, args):
    table = oracle.count(cfg.steps, cfg.n_max)
    length = None if args.length is None else args.length
    if (args.i is None) != (args.j is None):
        raise UsageError("--i and --j go together")
    sys.stdout.write(table.to_csv(length, args.i, args.j))
    return 0


def cmd_periods(cfg, args):
    kd = build_kernel(cfg.steps, cfg.z)
    u = build_uniformization(kd, branch_points(kd))
    d = u.as_dict()
    keys = ("omega1_im", "omega2", "omega3", "ratio", "g2", "g3", "branch_points")
    emit({k: d[k] for k in keys} | {"error_estimate": d["error_estimate"]}, cfg)
    return 0


def cmd_cgf(cfg, args):
    ctx = gfeval.build_pipeline(cfg.steps, cfg.z, cgf=args.form, hint=args.branch)
    t = parse_complex(args.t)
    w, dw = ctx.cgf.w_dw(t)
    wt = ctx.cgf.w_tilde(np.array([t]))[0]
    emit({"variant": ctx.cgf.variant, "t": t, "w": w, "dw": dw, "w_tilde": wt,
          "gluing_residual": cgf_mod.gluing_residual(ctx.cgf, 64)}, cfg)
    return 0


def _eval_singular(cfg, mode):
    s, z = cfg.steps, cfg.z
    if mode == "q00":
        return gfeval.eval_singular_boundary(0, s, z)
    if mode == "qx0":
        return gfeval.eval_singular_boundary(cfg.x, s, z, "x")
    if mode == "q0y":
        return gfeval.eval_singular_boundary(cfg.y, s, z, "y")
    return gfeval.eval_singular_q(cfg.x, cfg.y, s, z)


def _eval_regular(ctx, cfg, mode):
    q00 = gfeval.eval_q00(ctx)
    if mode == "q00":
        return q00
    if mode == "qx0":
        return gfeval.eval_q_axis("x", cfg.x, ctx, q00)
    if mode == "q0y":
        return gfeval.eval_q_axis("y", cfg.y, ctx, q00)
    return gfeval.eval_q(cfg.x, cfg.y, ctx, q00)


def cmd_eval(cfg, args):
    if is_singular(cfg.steps):
        v = _eval_singular(cfg, args.mode)
    else:
        ctx = gfeval.build_pipeline(cfg.steps, cfg.z, cgf=args.form, hint=args.branch,
                                    cut=args.cut)
        v = _eval_regular(ctx, cfg, args.mode)
    emit({"value": v.value, "error_estimate": v.error_estimate, "method": v.method}, cfg)
    return 0


def validate_report(cfg: RunConfig, form="general", branch="half", cut="upper") -> dict:
    """Residual maxima plus oracle comparisons at the standard test points."""
    s, z = cfg.steps, cfg.z
    checks = {}
    table = oracle.count(s, cfg.n_max)
    tail = oracle.tail_bound(s.k, z, cfg.n_max) if z < 1.0 / s.k else math.inf
    if is_singular(s):
        evaluate = lambda x, y: gfeval.eval_singular_q(x, y, s, z)  # noqa: E731
    else:
        ctx = gfeval.build_pipeline(s, z, cgf=form, hint=branch, cut=cut)
        q00 = gfeval.eval_q00(ctx)
        evaluate = lambda x, y: gfeval.eval_q(x, y, ctx, q00)  # noqa: E731
        for name, val in gfeval.residual_report(ctx, 32).items():
            checks[f"residual_{name}"] = {"value": val, "limit": cfg.tol, "pass": bool(val < cfg.tol)}
    for x, y in TEST_POINTS:
        v = evaluate(x, y)
        ref = oracle.partial_sum(table, x, y, z, "full")
        dev = abs(v.value - ref)
        limit = cfg.tol + tail
        checks[f"oracle_{x}_{y}"] = {"value": dev, "limit": limit, "pass": bool(dev < limit),
                                     "analytic": v.value, "oracle": ref}
    return {"steps": list(s.names), "z": z, "n_max": cfg.n_max,
            "pass": all(c["pass"] for c in checks.values()), "checks": checks}


def cmd_validate(cfg, args):
    report = validate_report(cfg, args.form, args.branch, args.cut)
    emit(report, cfg)
    return 0 if report["pass"] else 2


COMMANDS = {
    "classify": cmd_classify,
    "count": cmd_count,
    "periods": cmd_periods,
    "cgf": cmd_cgf,
    "eval": cmd_eval,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="quarterwalk", description="Quarter-plane walk generating functions.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--steps", required=True, help='step set, e.g. "N,E,S,W" or a registry name')
    common.add_argument("--z", type=float, default=None, help="default 1/(2k)")
    common.add_argument("--x", default="0")
    common.add_argument("--y", default="0")
    common.add_argument("--n", type=int, default=60, help="oracle length bound")
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--precision", type=int, default=None, help="significant digits")
    common.add_argument("--output", choices=("json", "csv", "text"), default="json")
    variants = _Parser(add_help=False)
    variants.add_argument("--form", choices=("general", "closed"), default="general")
    variants.add_argument("--branch", choices=("half", "flipped"), default="half",
                          help="representative of the inverse Weierstrass function")
    variants.add_argument("--cut", choices=("upper", "lower"), default="upper",
                          help="boundary value of the square root on the cut")
    sub.add_parser("classify", parents=[common])
    c = sub.add_parser("count", parents=[common])
    c.add_argument("--length", type=int, default=None, help="only this walk length")
    c.add_argument("--i", type=int, default=None)
    c.add_argument("--j", type=int, default=None)
    sub.add_parser("periods", parents=[common])
    c = sub.add_parser("cgf", parents=[common, variants])
    c.add_argument("--t", required=True)
    c = sub.add_parser("eval", parents=[common, variants])
    c.add_argument("--mode", choices=("q", "qx0", "q0y", "q00"), default="q")
    sub.add_parser("validate", parents=[common, variants])
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = _config(args)
        return COMMANDS[args.command](cfg, args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except (WalkError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
