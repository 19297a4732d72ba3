"""Compare the general elliptic gluing function with a closed form.

The two agree only up to a change of variable w -> (a w + b)/(c w + d),
so the comparison goes through the bracket kernel, which ignores such
changes.  Run with ``python3 notebooks/03_gluing_functions.py``.
"""

import numpy as np

from quarterwalk.cgf import bracket, build_cgf, build_closed_form, gluing_residual
from quarterwalk.elliptic import build_uniformization
from quarterwalk.kernel import build_kernel

for steps, z in (("W,NE,S", 0.2), ("E,SE,W,NW", 0.1), ("N,E,S,W", 0.125)):
    u = build_uniformization(build_kernel(steps, z))
    g, c = build_cgf(u), build_closed_form(steps, u)
    t = np.array([0.02 + 0.01j, -0.05, 0.1j, 0.3 * u.bp.x[1]])
    x = 0.5 * t[::-1] + 0.01
    gap = np.max(np.abs(bracket(g, t, x) - bracket(c, t, x)))
    print(f"{steps:12s} ratio={u.ratio:.6f} closed={c.variant:24s} "
          f"bracket gap={gap:.1e} gluing={gluing_residual(g, 64):.1e}")
