"""The cut point ``theta = sup{d : P[d, target] >= eps}``.

With atoms there may be no ``d`` whose closed interval ``[d, target]`` carries
probability exactly ``eps``.  The supremum always exists once
``P[0, target] > eps`` and satisfies

    P[theta, target] >= eps      and      P(theta, target] <= eps,

the first because ``[theta, target]`` keeps the atom at ``theta``, the
second because ``(theta, target]`` drops it.

Write ``g(d) = P[d, target] = F(target) - F(d-)``.  ``g`` is nonincreasing and
left-continuous, so the set ``{g >= eps}`` is an interval ``[0, theta]``.  It
is located exactly: scan the finitely many breakpoints (atoms, uniform ends,
0, target) and solve inside the continuous piece that follows the last
breakpoint still in the set.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from .measure import Distribution, Icc, Ioc, breakpoints, measure_interval

CERT_TOL = 1e-9
EXACT_TOL = 1e-12


class ThetaPreconditionError(ValueError):
    """The case split ``P[0, target] > eps`` that makes theta meaningful does not hold."""


@dataclass(frozen=True)
class ThetaCertificate:
    theta: float
    lower_measure: float  # P[theta, target]
    upper_measure: float  # P(theta, target]
    epsilon: float
    lower_ok: bool
    upper_ok: bool

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok

    def as_dict(self) -> dict:
        return asdict(self)


def closed_mass(dist: Distribution, d: float, target: float) -> float:
    """``g(d) = P[d, target]``."""
    return measure_interval(dist, Icc(d, target))


def open_mass(dist: Distribution, d: float, target: float) -> float:
    """``P(d, target]``, the right limit of ``g`` at ``d``."""
    return measure_interval(dist, Ioc(d, target))


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps={eps!r} must lie strictly between 0 and 1")


def _linear_slope(dist: Distribution, a: float, b: float) -> float:
    # Density of the uniform pieces covering (a, b); constant there by construction.
    return math.fsum(w / (hi - lo) for w, lo, hi in dist._uniforms if lo <= a and hi >= b)


def _sup_level(dist: Distribution, target: float, eps: float) -> float:
    # Assumes g(0) >= eps.
    pts = [0.0] + [b for b in breakpoints(dist) if 0.0 < b < target]
    if target > 0.0:
        pts.append(target)
    j = 0
    for k in range(len(pts) - 1, 0, -1):
        if closed_mass(dist, pts[k], target) >= eps:
            j = k
            break
    a = pts[j]
    if j == len(pts) - 1:
        return a
    if open_mass(dist, a, target) < eps:
        # g jumps past eps at the atom sitting on a.
        return a
    b = pts[j + 1]

    if not dist.has_exponential:
        slope = _linear_slope(dist, a, b)
        if slope <= 0.0:
            return a
        theta = min(a + (open_mass(dist, a, target) - eps) / slope, b)
        # Step back onto the float grid point that is still inside the set.
        for _ in range(64):
            if theta <= a or closed_mass(dist, theta, target) >= eps:
                break
            theta = math.nextafter(theta, a)
        return max(theta, a)

    # Bisect to float resolution, far below 1e-12 in d, so g(theta) stays tight on
    # steep exponential pieces.
    lo, hi = a, b
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if closed_mass(dist, mid, target) >= eps:
            lo = mid
        else:
            hi = mid
    return lo


def theta(dist: Distribution, target: float, eps: float) -> float:
    """Supremum of ``{d in [0, target] : P[d, target] >= eps}``.

    Raises :class:`ThetaPreconditionError` unless ``P[0, target] > eps``, the
    case in which the set is nonempty.  This is weaker than ``P(0, target] > eps``:
    an atom at 0 counts, as in the fair Bernoulli law where ``theta = 0``.
    """
    _check_eps(eps)
    head = closed_mass(dist, 0.0, target)
    if not head > eps:
        raise ThetaPreconditionError(
            f"case-split hypothesis P(x <= target) > eps fails: P[0, {target!r}] = {head!r} <= eps = {eps!r}; "
            "the learner then always succeeds and no cut point is needed"
        )
    return _sup_level(dist, target, eps)


def certify_theta(dist: Distribution, target: float, eps: float) -> ThetaCertificate:
    th = theta(dist, target, eps)
    lower = closed_mass(dist, th, target)
    upper = open_mass(dist, th, target)
    return ThetaCertificate(
        theta=th,
        lower_measure=lower,
        upper_measure=upper,
        epsilon=eps,
        lower_ok=lower >= eps - CERT_TOL,
        upper_ok=upper <= eps + CERT_TOL,
    )


def exact_theta_exists(dist: Distribution, target: float, eps: float) -> Optional[float]:
    """Some ``d`` in ``[0, target]`` with ``P[d, target] == eps`` (to 1e-12), else ``None``.

    Since ``g`` is nonincreasing and ``theta`` is the last point with
    ``g >= eps``, an exact solution exists iff ``g`` hits ``eps`` at ``theta``
    or immediately to its right.
    """
    _check_eps(eps)
    g0 = closed_mass(dist, 0.0, target)
    if abs(g0 - eps) <= EXACT_TOL:
        return 0.0
    if g0 < eps:
        return None
    th = _sup_level(dist, target, eps)
    for d in (th, math.nextafter(th, math.inf)):
        if d <= target and abs(closed_mass(dist, d, target) - eps) <= EXACT_TOL:
            return d
    return None
