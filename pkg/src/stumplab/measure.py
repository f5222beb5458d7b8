"""Finite mixtures of atoms, uniform pieces and exponentials on [0, inf).

Every distribution handled by the lab is a weighted mixture of

* ``Atom(x)``: a point mass at ``x``,
* ``Uniform(lo, hi)``: the uniform law on ``[lo, hi]``,
* ``Exponential(rate)``: the exponential law with the given rate.

These have closed-form distribution functions, so interval probabilities
are computed exactly as differences of ``F(x) = P[0, x]`` and its left
limit ``F(x-) = P[0, x)``.  Atoms are what make the two differ.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

WEIGHT_TOL = 1e-12
# Exponential tails are truncated here whenever a finite support bound is needed.
TAIL_MASS = 1e-15


class DistributionError(ValueError):
    """Raised for invalid distributions or malformed distribution literals."""


@dataclass(frozen=True)
class Atom:
    x: float

    kind = "atom"

    def params(self) -> tuple[float, ...]:
        return (self.x,)


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    kind = "uniform"

    def params(self) -> tuple[float, ...]:
        return (self.lo, self.hi)


@dataclass(frozen=True)
class Exponential:
    rate: float

    kind = "exp"

    def params(self) -> tuple[float, ...]:
        return (self.rate,)


Component = Union[Atom, Uniform, Exponential]

_KINDS = {"atom": (Atom, ("x",)), "uniform": (Uniform, ("lo", "hi")), "exp": (Exponential, ("rate",))}


@dataclass(frozen=True)
class Distribution:
    """Immutable weighted mixture; ``components`` is a tuple of ``(weight, component)``.

    Construction does not validate; call :func:`validate` or :func:`check`.
    Atoms at the same location are merged internally so that the mass at a
    point is a single number.
    """

    components: tuple[tuple[float, Component], ...]
    _atoms: tuple[tuple[float, float], ...] = field(init=False, repr=False, compare=False)
    _uniforms: tuple[tuple[float, float, float], ...] = field(init=False, repr=False, compare=False)
    _exps: tuple[tuple[float, float], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        comps = tuple((float(w), c) for w, c in self.components)
        object.__setattr__(self, "components", comps)
        masses: dict[float, list[float]] = {}
        uniforms, exps = [], []
        for w, c in comps:
            if isinstance(c, Atom):
                masses.setdefault(float(c.x), []).append(w)
            elif isinstance(c, Uniform):
                uniforms.append((w, float(c.lo), float(c.hi)))
            elif isinstance(c, Exponential):
                exps.append((w, float(c.rate)))
            else:
                raise DistributionError(f"unknown component {c!r}")
        atoms = tuple(sorted((x, math.fsum(ws)) for x, ws in masses.items()))
        object.__setattr__(self, "_atoms", atoms)
        object.__setattr__(self, "_uniforms", tuple(uniforms))
        object.__setattr__(self, "_exps", tuple(exps))

    @classmethod
    def of(cls, *pairs: tuple[float, Component]) -> "Distribution":
        return cls(tuple(pairs))

    @property
    def atoms(self) -> tuple[tuple[float, float], ...]:
        """Sorted ``(location, mass)`` pairs with duplicate locations merged."""
        return self._atoms

    @property
    def is_atomic(self) -> bool:
        return not self._uniforms and not self._exps

    @property
    def has_exponential(self) -> bool:
        return any(w > 0 for w, _ in self._exps)

    def __str__(self) -> str:
        return format_literal(self)


def atom(x: float) -> Distribution:
    return Distribution.of((1.0, Atom(x)))


def uniform(lo: float = 0.0, hi: float = 1.0) -> Distribution:
    return Distribution.of((1.0, Uniform(lo, hi)))


def exponential(rate: float) -> Distribution:
    return Distribution.of((1.0, Exponential(rate)))


def bernoulli(p: float = 0.5) -> Distribution:
    """Mass ``p`` at 1 and ``1 - p`` at 0."""
    return Distribution.of((1.0 - p, Atom(0.0)), (p, Atom(1.0)))


# -- validation ---------------------------------------------------------------

def validate(dist: Distribution) -> list[str]:
    """Return the list of violated invariants; empty means valid."""
    problems = []
    if not dist.components:
        problems.append("no components")
    for i, (w, c) in enumerate(dist.components):
        if not (0.0 <= w <= 1.0) or math.isnan(w):
            problems.append(f"component {i}: weight {w!r} outside [0, 1]")
        params = c.params()
        if any(not math.isfinite(p) for p in params):
            problems.append(f"component {i}: non-finite parameter in {c!r}")
            continue
        if isinstance(c, Atom) and c.x < 0:
            problems.append(f"component {i}: negative support, atom at {c.x!r}")
        elif isinstance(c, Uniform):
            if c.lo < 0:
                problems.append(f"component {i}: negative support, uniform lo {c.lo!r}")
            if c.lo >= c.hi:
                problems.append(f"component {i}: lo ≥ hi ({c.lo!r} ≥ {c.hi!r})")
        elif isinstance(c, Exponential) and c.rate <= 0:
            problems.append(f"component {i}: rate {c.rate!r} not positive")
    total = math.fsum(w for w, _ in dist.components)
    if dist.components and abs(total - 1.0) > WEIGHT_TOL:
        problems.append(f"weights sum {total:g}")
    return problems


def check(dist: Distribution) -> Distribution:
    problems = validate(dist)
    if problems:
        raise DistributionError("invalid distribution: " + "; ".join(problems))
    return dist


# -- distribution function ----------------------------------------------------

def _continuous_terms(dist: Distribution, x: float) -> list[float]:
    terms = []
    for w, lo, hi in dist._uniforms:
        if x >= hi:
            terms.append(w)
        elif x > lo:
            terms.append(w * ((x - lo) / (hi - lo)))
    if x > 0:
        for w, rate in dist._exps:
            terms.append(w * -math.expm1(-rate * x))
    return terms


def atom_mass(dist: Distribution, x: float) -> float:
    """Total point mass sitting exactly at ``x``."""
    for loc, mass in dist._atoms:
        if loc == x:
            return mass
        if loc > x:
            break
    return 0.0


def left_limit_cdf(dist: Distribution, x: float) -> float:
    """``F(x-) = P[0, x)``; zero at ``x = 0``."""
    if x <= 0:
        return 0.0
    terms = _continuous_terms(dist, x)
    terms.extend(mass for loc, mass in dist._atoms if loc < x)
    return min(1.0, math.fsum(terms))


def cdf(dist: Distribution, x: float) -> float:
    """``F(x) = P[0, x]``.  Equals ``left_limit_cdf(x) + atom_mass(x)`` bit for bit."""
    if x < 0:
        return 0.0
    return min(1.0, left_limit_cdf(dist, x) + atom_mass(dist, x))


def quantile(dist: Distribution, p: float) -> float:
    """Smallest ``x`` with ``F(x) >= p`` (bisection on the monotone CDF)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p!r} outside [0, 1]")
    if p == 0.0:
        return 0.0
    hi = support_max(dist)
    if cdf(dist, hi) < p:
        return hi
    lo = 0.0
    if cdf(dist, lo) >= p:
        return lo
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if cdf(dist, mid) >= p:
            hi = mid
        else:
            lo = mid
    return hi


def support_max(dist: Distribution) -> float:
    """Right end of the support, with exponential tails cut at mass ``TAIL_MASS``."""
    ends = [0.0]
    ends.extend(loc for loc, _ in dist._atoms)
    ends.extend(hi for _, _, hi in dist._uniforms)
    ends.extend(-math.log(TAIL_MASS) / rate for _, rate in dist._exps)
    return max(ends)


def breakpoints(dist: Distribution) -> list[float]:
    """Points where ``F`` may jump or change formula (atoms and uniform ends)."""
    pts = {loc for loc, _ in dist._atoms}
    for _, lo, hi in dist._uniforms:
        pts.update((lo, hi))
    return sorted(pts)


# -- intervals ----------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    """Interval with open (``o``) or closed (``c``) ends, e.g. ``kind="oc"`` is ``(lo, hi]``."""

    kind: str
    lo: float
    hi: float

    def __post_init__(self):
        if self.kind not in ("oo", "oc", "co", "cc"):
            raise ValueError(f"interval kind must be one of oo, oc, co, cc, got {self.kind!r}")
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval endpoint is NaN")
        if self.lo < 0:
            raise ValueError(f"interval lower end {self.lo!r} is negative")
        if self.lo > self.hi:
            raise ValueError(f"interval has lo > hi ({self.lo!r} > {self.hi!r})")

    def __contains__(self, x: float) -> bool:
        left = x >= self.lo if self.kind[0] == "c" else x > self.lo
        right = x <= self.hi if self.kind[1] == "c" else x < self.hi
        return left and right


def Ioo(lo, hi):
    return Interval("oo", lo, hi)


def Ioc(lo, hi):
    return Interval("oc", lo, hi)


def Ico(lo, hi):
    return Interval("co", lo, hi)


def Icc(lo, hi):
    return Interval("cc", lo, hi)


def measure_interval(dist: Distribution, iv: Interval) -> float:
    """Exact probability of ``iv`` from CDF differences and left limits."""
    if iv.lo == iv.hi and iv.kind != "cc":
        return 0.0
    upper = cdf(dist, iv.hi) if iv.kind[1] == "c" else left_limit_cdf(dist, iv.hi)
    lower = left_limit_cdf(dist, iv.lo) if iv.kind[0] == "c" else cdf(dist, iv.lo)
    return min(1.0, max(0.0, upper - lower))


# -- sampling -----------------------------------------------------------------

@dataclass(frozen=True)
class Seed:
    """Master seed with pure stream splitting.

    Stream ``i`` is ``PCG64(SeedSequence(master, spawn_key=(i,)))``, the same
    generator numpy's ``SeedSequence(master).spawn`` hands to child ``i``.
    """

    master: int

    def __post_init__(self):
        if not 0 <= self.master < 2**64:
            raise ValueError(f"seed {self.master!r} is not a 64-bit unsigned integer")

    def stream(self, index: int) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.master, spawn_key=(index,))))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.master)))


class _Sampler:
    # Columnar view of the mixture used by the vectorised inverse transform.
    def __init__(self, dist: Distribution):
        self.comps = [c for _, c in dist.components]
        self.cum = np.cumsum([w for w, _ in dist.components])

    def transform(self, u: np.ndarray) -> np.ndarray:
        # u has shape (m, 2): column 0 picks the component, column 1 drives it.
        idx = np.searchsorted(self.cum, u[:, 0] * self.cum[-1], side="right")
        np.minimum(idx, len(self.comps) - 1, out=idx)
        out = np.empty(len(u))
        for k, comp in enumerate(self.comps):
            sel = idx == k
            if not sel.any():
                continue
            v = u[sel, 1]
            if isinstance(comp, Atom):
                out[sel] = comp.x
            elif isinstance(comp, Uniform):
                out[sel] = np.minimum(comp.lo + v * (comp.hi - comp.lo), comp.hi)
            else:
                out[sel] = -np.log1p(-v) / comp.rate
        return out


_SAMPLERS: dict[int, tuple[Distribution, _Sampler]] = {}


def _sampler(dist: Distribution) -> _Sampler:
    hit = _SAMPLERS.get(id(dist))
    if hit is not None and hit[0] is dist:
        return hit[1]
    s = _Sampler(dist)
    if len(_SAMPLERS) > 256:
        _SAMPLERS.clear()
    _SAMPLERS[id(dist)] = (dist, s)
    return s


def sample_vector(dist: Distribution, m: int, rng: np.random.Generator) -> np.ndarray:
    """``m`` i.i.d. draws; draw ``i`` consumes uniforms ``2i`` and ``2i+1`` of ``rng``."""
    if m < 1:
        raise ValueError(f"sample size must be at least 1, got {m}")
    return _sampler(dist).transform(rng.random((m, 2)))


def sample(dist: Distribution, rng: np.random.Generator) -> float:
    return float(sample_vector(dist, 1, rng)[0])


# -- literal format -----------------------------------------------------------

_TERM = re.compile(r"^\s*(atom|uniform|exp)\s*\{([^{}]*)\}\s*:\s*([^\s,{}]+)\s*$")


def _number(text: str, what: str) -> float:
    text = text.strip()
    try:
        if "/" in text:
            return float(Fraction(text))
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise DistributionError(f"malformed number {text!r} in {what}") from None


def _split_top(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth < 0:
                raise DistributionError(f"unbalanced braces in {text!r}")
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise DistributionError(f"unbalanced braces in {text!r}")
    parts.append("".join(cur))
    return parts


def _component(kind: str, params: Sequence[float]) -> Component:
    cls, names = _KINDS[kind]
    if len(params) != len(names):
        raise DistributionError(f"{kind} takes {len(names)} parameter(s) ({', '.join(names)}), got {len(params)}")
    return cls(*params)


def parse_literal(text: str) -> Distribution:
    """Parse ``kind{params}:weight`` terms joined by commas.

    ``'atom{0}:0.5,atom{1}:0.5'`` is the fair Bernoulli law and
    ``'uniform{0,1}:0.5,atom{0.5}:0.5'`` a half-uniform, half-atom mixture.
    Weights may be written as fractions (``1/3``).  A JSON list of records is
    accepted too (see :func:`from_records`).
    """
    text = text.strip()
    if text.startswith("["):
        try:
            return from_records(json.loads(text))
        except json.JSONDecodeError as exc:
            raise DistributionError(f"malformed distribution records: {exc}") from None
    if not text:
        raise DistributionError("empty distribution literal")
    pairs = []
    for term in _split_top(text):
        mt = _TERM.match(term)
        if not mt:
            raise DistributionError(f"malformed distribution term {term.strip()!r}; expected kind{{params}}:weight")
        kind, body, weight = mt.groups()
        params = [_number(p, term) for p in body.split(",")] if body.strip() else []
        pairs.append((_number(weight, term), _component(kind, params)))
    return check(Distribution(tuple(pairs)))


def from_records(records: Iterable[dict]) -> Distribution:
    """Build from ``[{"weight": w, "kind": k, "params": {...}}, ...]``."""
    pairs = []
    for rec in records:
        if not isinstance(rec, dict) or not {"weight", "kind", "params"} <= rec.keys():
            raise DistributionError(f"distribution record {rec!r} needs weight, kind and params")
        kind = rec["kind"]
        if kind not in _KINDS:
            raise DistributionError(f"unknown component kind {kind!r}")
        names = _KINDS[kind][1]
        raw = rec["params"]
        if isinstance(raw, dict):
            missing = [n for n in names if n not in raw]
            if missing:
                raise DistributionError(f"{kind} record missing {', '.join(missing)}")
            raw = [raw[n] for n in names]
        params = [_number(str(p), kind) for p in raw]
        pairs.append((_number(str(rec["weight"]), kind), _component(kind, params)))
    return check(Distribution(tuple(pairs)))


def coerce(value) -> Distribution:
    """Accept a Distribution, a literal string, or a list of records."""
    if isinstance(value, Distribution):
        return check(value)
    if isinstance(value, str):
        return parse_literal(value)
    if isinstance(value, list):
        return from_records(value)
    raise DistributionError(f"cannot interpret {value!r} as a distribution")


def _fmt(x: float) -> str:
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def format_literal(dist: Distribution) -> str:
    return ",".join(
        f"{c.kind}{{{','.join(_fmt(p) for p in c.params())}}}:{_fmt(w)}" for w, c in dist.components
    )


def to_records(dist: Distribution) -> list[dict]:
    out = []
    for w, c in dist.components:
        names = _KINDS[c.kind][1]
        out.append({"weight": w, "kind": c.kind, "params": dict(zip(names, c.params()))})
    return out
