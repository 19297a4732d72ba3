"""Generating functions of walks with small steps in the quarter plane.

Typical use::

    from quarterwalk import build_pipeline, eval_q
    ctx = build_pipeline("N,E,S,W", 1 / 8)
    eval_q(0.3, 0.4, ctx).value
"""

from .cgf import build_cgf, build_closed_form, gluing_residual, invariant_kernel
from .elliptic import Lattice, build_uniformization, carlson_rf, wp_eval
from .errors import (
    AccuracyError,
    BranchError,
    DegenerateModelError,
    DomainError,
    NumericError,
    ParseError,
    PoleError,
    RegionError,
    SearchError,
    SingularModelError,
    WalkError,
)
from .gfeval import (
    GFValue,
    build_pipeline,
    eval_boundary_gf,
    eval_q,
    eval_q00,
    eval_singular_boundary,
    residual_report,
)
from .kernel import branch_points, build_kernel, kernel_value, region_contains
from .oracle import count, partial_sum_with_bound
from .stepset import REGISTRY, StepSet, classify, group_order, parse_step_set

__version__ = "0.1.0"
