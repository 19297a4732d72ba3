"""Small-step models: parsing, covariance, the group of the walk, classification.

A model is a nonempty subset of the eight nearest-neighbour steps
``{-1, 0, 1}^2 \\ {(0, 0)}``, written either with compass tokens
(``"N,E,S,W"``) or as an 8-bit mask.  Mask bits run clockwise from north:
bit 0 = N, 1 = NE, 2 = E, 3 = SE, 4 = S, 5 = SW, 6 = W, 7 = NW.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import DegenerateModelError, ParseError

COMPASS = {
    "N": (0, 1),
    "NE": (1, 1),
    "E": (1, 0),
    "SE": (1, -1),
    "S": (0, -1),
    "SW": (-1, -1),
    "W": (-1, 0),
    "NW": (-1, 1),
}
MASK_ORDER = ("N", "NE", "E", "SE", "S", "SW", "W", "NW")
_NAMES = {v: k for k, v in COMPASS.items()}

INFINITE = "infinite"
GROUP_SEED = 7919
GROUP_POINTS = 5


@dataclass(frozen=True)
class StepSet:
    """An immutable set of small steps ``(i, j)``."""

    steps: frozenset

    def __post_init__(self):
        steps = frozenset((int(i), int(j)) for i, j in self.steps)
        if not steps:
            raise ParseError("empty step set")
        for s in steps:
            if s not in _NAMES:
                raise ParseError(f"invalid step {s}")
        object.__setattr__(self, "steps", steps)

    @classmethod
    def from_steps(cls, steps: Iterable) -> "StepSet":
        return cls(frozenset(steps))

    @property
    def k(self) -> int:
        return len(self.steps)

    @property
    def names(self) -> tuple:
        """Compass names in mask order."""
        return tuple(n for n in MASK_ORDER if COMPASS[n] in self.steps)

    @property
    def mask(self) -> int:
        return sum(1 << b for b, n in enumerate(MASK_ORDER) if COMPASS[n] in self.steps)

    def __contains__(self, step) -> bool:
        if isinstance(step, str):
            step = COMPASS[step.upper()]
        return tuple(step) in self.steps

    def __iter__(self):
        return iter(sorted(self.steps))

    def __len__(self):
        return len(self.steps)

    def __str__(self):
        return ",".join(self.names)

    def reflect(self) -> "StepSet":
        """Diagonal reflection ``(i, j) -> (j, i)``."""
        return StepSet(frozenset((j, i) for i, j in self.steps))

    @property
    def delta(self) -> int:
        return 1 if (-1, -1) in self.steps else 0

    @property
    def degenerate(self) -> bool:
        """True when some direction i=-1, i=+1, j=-1 or j=+1 is missing."""
        xs = {i for i, _ in self.steps}
        ys = {j for _, j in self.steps}
        return not ({-1, 1} <= xs and {-1, 1} <= ys)

    @property
    def degenerate_reason(self):
        """The first missing direction, e.g. ``"no step with i=-1"``, or None."""
        xs = {i for i, _ in self.steps}
        ys = {j for _, j in self.steps}
        for name, have, v in (("i", xs, -1), ("i", xs, 1), ("j", ys, -1), ("j", ys, 1)):
            if v not in have:
                return f"no step with {name}={v}"
        return None

    def coefficients(self, axis: str, level: int) -> tuple:
        """Indicator coefficients of ``sum x^i`` over steps ``(i, level)``.

        ``axis="x"`` returns ``([i=-1], [i=0], [i=1])`` for steps with ``j == level``;
        ``axis="y"`` is the same with the roles of ``i`` and ``j`` exchanged.
        """
        if axis == "x":
            return tuple(int((i, level) in self.steps) for i in (-1, 0, 1))
        return tuple(int((level, j) in self.steps) for j in (-1, 0, 1))


def parse_step_set(text) -> StepSet:
    """Parse ``"N,E,S,W"`` style text, an int mask, or a registry name."""
    if isinstance(text, StepSet):
        return text
    if isinstance(text, int):
        return _from_mask(text)
    raw = str(text).strip()
    if not raw:
        raise ParseError("empty step set")
    if raw.lower() in REGISTRY:
        return REGISTRY[raw.lower()]
    if raw.isdigit() or raw.lower().startswith("0x") or raw.lower().startswith("0b"):
        try:
            return _from_mask(int(raw, 0))
        except ValueError:
            raise ParseError(f"bad mask {raw!r}") from None
    steps = set()
    for tok in raw.replace(" ", ",").split(","):
        tok = tok.strip().upper()
        if not tok:
            continue
        if tok not in COMPASS:
            raise ParseError(f"unknown token {tok}")
        steps.add(COMPASS[tok])
    if not steps:
        raise ParseError("empty step set")
    return StepSet(frozenset(steps))


def _from_mask(mask: int) -> StepSet:
    if not 1 <= mask <= 255:
        raise ParseError(f"mask {mask} outside [1, 255]")
    return StepSet(frozenset(COMPASS[n] for b, n in enumerate(MASK_ORDER) if mask >> b & 1))


def covariance(s: StepSet) -> int:
    return sum(i * j for i, j in s.steps)


def is_singular(s: StepSet) -> bool:
    """All steps in the half-plane ``i + j >= 0``, both NW and SE present,
    and at least one step pointing strictly into ``i + j > 0``."""
    return (
        (-1, 1) in s.steps
        and (1, -1) in s.steps
        and all(i + j >= 0 for i, j in s.steps)
        and any(i + j > 0 for i, j in s.steps)
    )


# --- the group of the walk --------------------------------------------------


def _laurent(coeffs, t):
    # coeffs = ([power -1], [power 0], [power 1])
    return coeffs[0] / t + coeffs[1] + coeffs[2] * t


def psi(s: StepSet, x, y):
    """The involution fixing x: ``y -> (sum_{(i,-1)} x^i / sum_{(i,+1)} x^i) / y``."""
    num = _laurent(s.coefficients("x", -1), x)
    den = _laurent(s.coefficients("x", 1), x)
    return x, num / (den * y)


def phi(s: StepSet, x, y):
    """The involution fixing y: ``x -> (sum_{(-1,j)} y^j / sum_{(+1,j)} y^j) / x``."""
    num = _laurent(s.coefficients("y", -1), y)
    den = _laurent(s.coefficients("y", 1), y)
    return num / (den * x), y


def theta(s: StepSet, x, y):
    return phi(s, *psi(s, x, y))


def _random_points(rng, n):
    pts = []
    while len(pts) < n:
        x = Fraction(rng.randint(-997, 997), rng.randint(1, 997))
        y = Fraction(rng.randint(-997, 997), rng.randint(1, 997))
        if x and y:
            pts.append((x, y))
    return pts


def group_order(s: StepSet, seed: int = GROUP_SEED, symbolic: bool = False):
    """Order of the group generated by ``psi`` and ``phi``: 4, 6, 8 or ``"infinite"``.

    ``theta = phi o psi`` is iterated in exact rational arithmetic at
    ``GROUP_POINTS`` random points; the order is ``2m`` for the least
    ``m <= 4`` with ``theta^m = id`` at every point.  Finite orders never
    exceed 8 for small-step models, so failing at ``m = 4`` means infinite.
    With ``symbolic=True`` a detected identity is confirmed with sympy.
    """
    if s.degenerate:
        raise DegenerateModelError("group undefined for half-plane-reducible model")
    rng = random.Random(seed)
    pts = []
    while len(pts) < GROUP_POINTS:
        for p in _random_points(rng, GROUP_POINTS - len(pts)):
            try:
                _orbit(s, p, 4)
            except ZeroDivisionError:
                continue
            pts.append(p)
    for m in range(1, 5):
        if all(_orbit(s, p, m) == p for p in pts):
            if symbolic and not _symbolic_identity(s, m):
                continue
            return 2 * m
    return INFINITE


def _orbit(s, p, m):
    x, y = p
    for _ in range(m):
        x, y = theta(s, x, y)
    return x, y


def _symbolic_identity(s: StepSet, m: int) -> bool:
    import sympy

    X, Y = sympy.symbols("x y")
    x, y = X, Y
    for _ in range(m):
        x, y = theta(s, x, y)
        x, y = sympy.cancel(x), sympy.cancel(y)
    return sympy.simplify(x - X) == 0 and sympy.simplify(y - Y) == 0


# --- classification ---------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    steps: StepSet
    covariance: int
    delta: int
    singular: bool
    degenerate: bool
    group_order: object = None  # 4, 6, 8, "infinite" or None when degenerate
    cgf_nature: str | None = None

    @property
    def k(self) -> int:
        return self.steps.k

    def as_dict(self) -> dict:
        return {
            "steps": list(self.steps.names),
            "k": self.k,
            "covariance": self.covariance,
            "delta": self.delta,
            "singular": self.singular,
            "degenerate": self.degenerate,
            "group_order": self.group_order,
            "cgf_nature": self.cgf_nature,
        }


def cgf_nature(order, cov: int) -> str:
    if order == INFINITE:
        return "non-holonomic"
    return "rational" if cov <= 0 else "algebraic"


def classify(s: StepSet) -> Classification:
    cov = covariance(s)
    if s.degenerate:
        return Classification(s, cov, s.delta, False, True)
    singular = is_singular(s)
    order = group_order(s)
    nature = None if singular else cgf_nature(order, cov)
    return Classification(s, cov, s.delta, singular, False, order, nature)


def _ss(text):
    return StepSet(frozenset(COMPASS[t] for t in text.split(",")))


REGISTRY = {
    "simple": _ss("N,E,S,W"),
    "diagonal": _ss("NE,SE,SW,NW"),
    "kreweras": _ss("W,NE,S"),
    "reverse-kreweras": _ss("N,E,SW"),
    "double-kreweras": _ss("N,NE,E,S,SW,W"),
    "gessel": _ss("E,SW,W,NE"),
    "gouyou-beauchamps": _ss("E,SE,W,NW"),
    "order6-neg-a": _ss("N,SE,W"),
    "order6-neg-b": _ss("N,E,SE,S,W,NW"),
    "simple-ne": _ss("N,E,S,W,NE"),
    "singular-1": _ss("NW,NE,SE"),
    "singular-2": _ss("NW,N,SE"),
    "singular-3": _ss("NW,N,NE,SE"),
    "singular-4": _ss("NW,N,E,SE"),
    "singular-5": _ss("NW,N,NE,E,SE"),
}
"""Named models: the finite-group families with closed-form gluing functions,
Gessel's walk, the five singular walks and one infinite-group example."""

SINGULAR_MODELS = tuple(REGISTRY[f"singular-{i}"] for i in range(1, 6))
