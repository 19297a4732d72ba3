"""Classify the registry models and print a few exact counts.

Run with ``python3 notebooks/01_classify_and_count.py``.
"""

from quarterwalk import oracle
from quarterwalk.stepset import REGISTRY, classify

for name, steps in REGISTRY.items():
    c = classify(steps)
    print(f"{name:20s} {str(steps):16s} order={c.group_order!s:9s} cov={c.covariance:+d} "
          f"singular={c.singular} cgf={c.cgf_nature}")

table = oracle.count(REGISTRY["kreweras"], 12)
print("Kreweras excursions:", [table(0, 0, n) for n in range(0, 13, 3)])
