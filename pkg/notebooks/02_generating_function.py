"""Evaluate Q(x, y; z) analytically and compare with the exact oracle.

Run with ``python3 notebooks/02_generating_function.py``.
"""

from quarterwalk import oracle
from quarterwalk.gfeval import build_pipeline, eval_q, eval_q00, residual_report

for steps in ("N,E,S,W", "W,NE,S", "E,SW,W,NE", "N,E,S,W,NE"):
    k = len(steps.split(","))
    z = 1 / (2 * k)
    ctx = build_pipeline(steps, z)
    q00 = eval_q00(ctx)
    table = oracle.count(steps, 60)
    print(f"{steps} at z={z:.4f}: Q(0,0)={q00.value.real:.12f}")
    for x, y in ((0.3, 0.4), (0.5, 0.5)):
        v = eval_q(x, y, ctx, q00)
        ref, tail = oracle.partial_sum_with_bound(table, x, y, z)
        print(f"  Q({x},{y}) = {v.value.real:.12f}  oracle {ref:.12f}  "
              f"(error estimate {v.error_estimate:.1e}, tail {tail:.1e})")
    print("  residuals:", {k: f"{v:.1e}" for k, v in residual_report(ctx, 32).items()})
