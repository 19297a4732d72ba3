"""The five singular models through the iterated-kernel series.

Run with ``python3 notebooks/04_singular_series.py``.
"""

from quarterwalk import oracle
from quarterwalk.gfeval import eval_singular_boundary
from quarterwalk.stepset import SINGULAR_MODELS

z = 0.2
for s in SINGULAR_MODELS:
    table = oracle.count(s, 80)
    v = eval_singular_boundary(0.5, s, z)
    ref = oracle.partial_sum(table, 0.5, 0, z, "x-axis")
    print(f"{str(s):14s} Q(0.5,0)={v.value.real:.14f}  oracle {ref:.14f}")
