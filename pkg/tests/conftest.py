import math

import numpy as np
import pytest
from hypothesis import strategies as st

from stumplab.measure import Atom, Distribution, Exponential, Icc, Uniform, measure_interval
from stumplab.theta import closed_mass


def random_mixture(rng: np.random.Generator, families=("atom", "uniform", "exp")) -> Distribution:
    """Random mixture of 1-5 components drawn from ``families``."""
    k = int(rng.integers(1, 6))
    raw = rng.dirichlet(np.ones(k))
    weights = [float(w) for w in raw[:-1]]
    weights.append(1.0 - math.fsum(weights))
    comps = []
    for w in weights:
        kind = families[int(rng.integers(len(families)))]
        if kind == "atom":
            # Grid-valued atoms make collisions with targets and each other likely.
            x = float(rng.integers(0, 21)) / 10 if rng.random() < 0.5 else float(rng.uniform(0, 2))
            comps.append((w, Atom(x)))
        elif kind == "uniform":
            lo = float(rng.uniform(0, 1.5))
            comps.append((w, Uniform(lo, lo + float(rng.uniform(0.05, 1.0)))))
        else:
            comps.append((w, Exponential(float(rng.uniform(0.5, 5.0)))))
    return Distribution(tuple(comps))


def theta_cases(n, seed, families=("atom", "uniform", "exp")):
    """``n`` random (dist, target, eps) with P[0, target] > eps, so theta is defined."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        dist = random_mixture(rng, families)
        t = float(rng.uniform(0, 2.5)) if rng.random() < 0.7 else float(rng.integers(0, 21)) / 10
        head = measure_interval(dist, Icc(0, t))
        if head <= 1e-6:
            continue
        eps = float(rng.uniform(0, head))
        if rng.random() < 0.2:
            # Land eps exactly on an atom-induced level of g.
            levels = [closed_mass(dist, x, t) for x, _ in dist.atoms if x <= t]
            levels = [v for v in levels if 0 < v < head]
            if levels:
                eps = levels[int(rng.integers(len(levels)))]
        if 0 < eps < min(head, 1.0):
            out.append((dist, t, eps))
    return out


@st.composite
def mixtures(draw, families=("atom", "uniform", "exp")):
    k = draw(st.integers(1, 4))
    raw = draw(st.lists(st.floats(0.05, 1.0), min_size=k, max_size=k))
    total = math.fsum(raw)
    weights = [r / total for r in raw[:-1]]
    weights.append(1.0 - math.fsum(weights))
    comps = []
    for w in weights:
        kind = draw(st.sampled_from(families))
        if kind == "atom":
            x = draw(st.one_of(st.sampled_from([0.0, 0.25, 0.5, 1.0]), st.floats(0, 3)))
            comps.append((w, Atom(x)))
        elif kind == "uniform":
            lo = draw(st.floats(0, 2))
            comps.append((w, Uniform(lo, lo + draw(st.floats(0.01, 2)))))
        else:
            comps.append((w, Exponential(draw(st.floats(0.1, 10)))))
    return Distribution(tuple(comps))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
