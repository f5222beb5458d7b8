"""Decision stumps on [0, inf): labelling, the max-positive learner, and exact error.

A stump is identified with its threshold ``d``: it labels ``x`` positive iff
``x <= d``.  The learner keeps the largest positively labelled point (0 when
there is none), so it never overshoots the target.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .measure import Distribution, Ioc, measure_interval


class LabeledExample(NamedTuple):
    point: float
    label: bool


def label(target: float, x: float) -> LabeledExample:
    return LabeledExample(x, x <= target)


def label_sample(target: float, xs: Sequence[float]) -> list[LabeledExample]:
    if len(xs) == 0:
        raise ValueError("cannot label an empty sample")
    return [LabeledExample(float(x), bool(x <= target)) for x in xs]


def filter_positive(labeled: Sequence[LabeledExample]) -> list[float]:
    """Keep positive points, send negative ones to 0."""
    if len(labeled) == 0:
        raise ValueError("cannot filter an empty sample")
    return [p if lab else 0.0 for p, lab in labeled]


def choose(labeled: Sequence[LabeledExample]) -> float:
    """Largest positively labelled point, or 0 if every label is negative."""
    return max(filter_positive(labeled))


def choose_from_points(target: float, xs: np.ndarray) -> float:
    """``choose(label_sample(target, xs))`` without building the tuples."""
    if len(xs) == 0:
        raise ValueError("cannot choose from an empty sample")
    pos = xs[xs <= target]
    return float(pos.max()) if len(pos) else 0.0


def error(dist: Distribution, target: float, h: float) -> float:
    """Probability that the stump at ``h`` disagrees with the one at ``target``."""
    lo, hi = (h, target) if h <= target else (target, h)
    return measure_interval(dist, Ioc(lo, hi))


def misclassified(target: float, h: float, x: float) -> bool:
    return (x <= h) != (x <= target)
