"""Sample complexity and verification of the (eps, delta) guarantee for stumps.

One training run draws ``m`` i.i.d. points, labels them with the target
stump, runs :func:`~stumplab.learner.choose` and scores the result with its
exact error.  :func:`verify_pac` repeats this over seeded, independent
trials; for purely atomic distributions :func:`exact_success_probability`
computes the success probability by enumerating every outcome.

Throughout, ``m`` is the number of training examples.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence, Union

import numpy as np

from . import measure
from .learner import choose_from_points, error
from .measure import Distribution, Icc, Ioc, Seed, measure_interval, sample_vector
from .theta import certify_theta

ENUMERATION_BUDGET = 10**7
SLACK_SIGMAS = 4.0
EXACT_TOL = 1e-12


class ConfigError(ValueError):
    """An experiment configuration violates its domain constraints."""


class EnumerationBudgetError(ValueError):
    pass


def _check_unit(name: str, value: float) -> None:
    if not isinstance(value, (int, float)) or not 0.0 < value < 1.0:
        raise ConfigError(f"{name}={value!r} must lie strictly between 0 and 1")


def complexity(eps: float, delta: float) -> float:
    """``ln(delta) / ln(1 - eps) - 1``."""
    _check_unit("eps", eps)
    _check_unit("delta", delta)
    return math.log(delta) / math.log1p(-eps) - 1.0


def failure_bound(eps: float, m: int) -> float:
    """``(1 - eps)**m``: chance that no training point lands in the heavy slab."""
    return (1.0 - eps) ** m


def min_sample_count(eps: float, delta: float) -> int:
    """Smallest ``m >= 1`` with ``(1 - eps)**m <= delta``, settled by direct powers."""
    c = complexity(eps, delta)
    m = max(1, math.floor(c) + 1)
    while failure_bound(eps, m) > delta:
        m += 1
    while m > 1 and failure_bound(eps, m - 1) <= delta:
        m -= 1
    return m


@dataclass(frozen=True)
class ExperimentConfig:
    dist: Distribution
    target: float
    epsilon: float
    delta: float
    m: int
    trials: int
    seed: int = 0

    def problems(self) -> list[str]:
        out = [f"dist: {p}" for p in measure.validate(self.dist)]
        if not (isinstance(self.target, (int, float)) and self.target >= 0 and math.isfinite(self.target)):
            out.append(f"target: {self.target!r} must be a finite nonnegative number")
        for name in ("epsilon", "delta"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and 0.0 < v < 1.0):
                out.append(f"{name}: {v!r} must lie strictly between 0 and 1")
        for name in ("m", "trials"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                out.append(f"{name}: {v!r} must be a positive integer")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            out.append(f"seed: {self.seed!r} must be a 64-bit unsigned integer")
        return out

    def check(self) -> "ExperimentConfig":
        problems = self.problems()
        if problems:
            raise ConfigError("; ".join(problems))
        return self

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        """Build from a plain mapping; ``m`` may be ``"auto"`` and ``dist`` a literal or records.

        ``eps``/``epsilon`` and ``m``/``sample_count`` are accepted as aliases.
        """
        data = dict(data)
        aliases = {"eps": "epsilon", "sample_count": "m", "T": "trials"}
        for short, full in aliases.items():
            if short in data:
                data.setdefault(full, data.pop(short))
        known = {"dist", "target", "epsilon", "delta", "m", "trials", "seed"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
        missing = sorted(known - {"seed"} - set(data))
        if missing:
            raise ConfigError(f"missing config field(s): {', '.join(missing)}")
        try:
            dist = measure.coerce(data["dist"])
        except measure.DistributionError as exc:
            raise ConfigError(f"dist: {exc}") from None

        def num(name):
            v = data[name]
            if isinstance(v, bool):
                raise ConfigError(f"{name}: {v!r} is not a number")
            try:
                return float(v)
            except (TypeError, ValueError):
                raise ConfigError(f"{name}: {v!r} is not a number") from None

        def integer(name, v):
            if isinstance(v, bool):
                raise ConfigError(f"{name}: {v!r} is not an integer")
            if isinstance(v, float) and v.is_integer():
                return int(v)
            try:
                return int(v)
            except (TypeError, ValueError):
                raise ConfigError(f"{name}: {v!r} is not an integer") from None

        eps, delta = num("epsilon"), num("delta")
        m = data["m"]
        if isinstance(m, str) and m.strip().lower() == "auto":
            _check_unit("epsilon", eps)
            _check_unit("delta", delta)
            m = min_sample_count(eps, delta)
        else:
            m = integer("m", m)
        cfg = cls(
            dist=dist,
            target=num("target"),
            epsilon=eps,
            delta=delta,
            m=m,
            trials=integer("trials", data["trials"]),
            seed=integer("seed", data.get("seed", 0)),
        )
        return cfg.check()


@dataclass(frozen=True)
class TrialReport:
    trial_index: int
    chosen: float
    err: float
    success: bool


@dataclass
class VerificationReport:
    config: ExperimentConfig
    successes: int
    empirical_success: float
    exact_success: Optional[float]
    bound: float
    guarantee_target: float
    min_sample_count: int
    sufficient_m: bool
    slack: float
    verdict_guarantee: bool
    verdict_failure_bound: bool
    verdict_exact: Optional[bool]
    always_succeed_branch: bool
    theta: Optional[float]
    failing_trials: int
    all_missed_violations: int
    miss_frequency: Optional[float]
    miss_frequency_bound: Optional[float]
    verdict_all_missed: bool
    verdict_miss_prob: Optional[bool]
    trials: list[TrialReport] = field(default_factory=list, repr=False)
    # Wall-clock figures; excluded from serialized records so reruns are byte-identical.
    runtime: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def passed(self) -> bool:
        verdicts = (
            self.verdict_guarantee,
            self.verdict_failure_bound,
            self.verdict_exact,
            self.verdict_all_missed,
            self.verdict_miss_prob,
        )
        return all(v is not False for v in verdicts)


def run_trial(
    dist: Distribution, target: float, m: int, rng: np.random.Generator, eps: float
) -> TrialReport:
    """sample -> label -> choose -> exact error, for a single training run."""
    xs = sample_vector(dist, m, rng)
    chosen = choose_from_points(target, xs)
    err = error(dist, target, chosen)
    return TrialReport(trial_index=-1, chosen=chosen, err=err, success=err <= eps)


def _run_block(args):
    dist, target, eps, m, master, start, stop, theta = args
    seed = Seed(master)
    rows = []
    for i in range(start, stop):
        xs = sample_vector(dist, m, seed.stream(i))
        chosen = choose_from_points(target, xs)
        err = error(dist, target, chosen)
        success = err <= eps
        misses = 0
        all_missed = True
        if theta is not None:
            # Negative points are mapped to 0 before the max.
            mapped = np.where(xs <= target, xs, 0.0)
            below = mapped < theta
            misses = int(below.sum())
            all_missed = bool(below.all())
        rows.append((i, chosen, err, success, misses, success or all_missed))
    return rows


def _blocks(trials: int, workers: int) -> list[tuple[int, int]]:
    n = max(1, min(workers * 4, trials))
    edges = [trials * k // n for k in range(n + 1)]
    return [(a, b) for a, b in zip(edges, edges[1:]) if b > a]


def verify_pac(config: ExperimentConfig, workers: int = 1, keep_trials: bool = False) -> VerificationReport:
    """Run ``config.trials`` seeded trials and compare against the (eps, delta) bound.

    Trial ``i`` always draws from stream ``i`` of the seed, so the report does
    not depend on ``workers``.
    """
    config.check()
    t0 = time.perf_counter()
    dist, target, eps, delta, m, T = (
        config.dist, config.target, config.epsilon, config.delta, config.m, config.trials,
    )
    head = measure_interval(dist, Ioc(0.0, target)) if target > 0 else 0.0
    always = head <= eps
    # theta is defined whenever P[0, target] > eps, which covers an atom at 0 too.
    th = certify_theta(dist, target, eps).theta if measure_interval(dist, Icc(0.0, target)) > eps else None

    jobs = [(dist, target, eps, m, config.seed, a, b, th) for a, b in _blocks(T, workers)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_run_block, jobs))
    else:
        blocks = [_run_block(j) for j in jobs]
    rows = sorted((r for block in blocks for r in block), key=lambda r: r[0])

    successes = sum(1 for r in rows if r[3])
    failing = T - successes
    empirical = successes / T
    bound = 1.0 - failure_bound(eps, m)
    n_min = min_sample_count(eps, delta)
    sufficient = m >= n_min
    slack = SLACK_SIGMAS * math.sqrt(delta * (1.0 - delta) / T)
    verdict_guarantee = (not sufficient) or empirical >= 1.0 - delta - slack
    p_fail = failure_bound(eps, m)
    verdict_failure = failing / T <= p_fail + SLACK_SIGMAS * math.sqrt(p_fail * (1.0 - p_fail) / T)

    exact = None
    verdict_exact = None
    if dist.is_atomic and _outcome_count(dist, m) <= ENUMERATION_BUDGET:
        exact = exact_success_probability(dist, target, m, eps)
        verdict_exact = exact >= bound - EXACT_TOL

    if th is None:
        miss_freq = miss_bound = None
        verdict_miss = None
        violations = 0
    else:
        n_examples = T * m
        miss_freq = sum(r[4] for r in rows) / n_examples
        miss_bound = 1.0 - eps + SLACK_SIGMAS * math.sqrt(eps * (1.0 - eps) / n_examples)
        verdict_miss = miss_freq <= miss_bound
        violations = sum(1 for r in rows if not r[5])

    report = VerificationReport(
        config=config,
        successes=successes,
        empirical_success=empirical,
        exact_success=exact,
        bound=bound,
        guarantee_target=1.0 - delta,
        min_sample_count=n_min,
        sufficient_m=sufficient,
        slack=slack,
        verdict_guarantee=verdict_guarantee,
        verdict_failure_bound=verdict_failure,
        verdict_exact=verdict_exact,
        always_succeed_branch=always,
        theta=th,
        failing_trials=failing,
        all_missed_violations=violations,
        miss_frequency=miss_freq,
        miss_frequency_bound=miss_bound,
        verdict_all_missed=violations == 0,
        verdict_miss_prob=verdict_miss,
    )
    if keep_trials:
        report.trials = [TrialReport(i, c, e, s) for i, c, e, s, _, _ in rows]
    report.runtime = {"seconds": time.perf_counter() - t0, "workers": workers}
    return report


def _outcome_count(dist: Distribution, m: int) -> int:
    k = sum(1 for _, mass in dist.atoms if mass > 0)
    return k**m


def exact_success_probability(
    dist: Distribution, target: float, m: int, eps: float, budget: int = ENUMERATION_BUDGET
) -> float:
    """P(error of the learned stump <= eps), by summing over all ``k**m`` ordered samples.

    Terms are accumulated with :func:`math.fsum` (exactly rounded summation).
    """
    if not dist.is_atomic:
        raise ValueError("exact enumeration needs a purely atomic distribution")
    if m < 1:
        raise ValueError(f"sample size must be at least 1, got {m}")
    support = [(x, p) for x, p in dist.atoms if p > 0]
    k = len(support)
    if k**m > budget:
        raise EnumerationBudgetError(
            f"{k}**{m} = {k**m} outcomes exceeds the enumeration budget {budget}; use Monte Carlo (verify) instead"
        )
    mapped = [x if x <= target else 0.0 for x, _ in support]
    probs = [p for _, p in support]
    ok = {v: error(dist, target, v) <= eps for v in set(mapped)}

    def terms():
        for outcome in itertools.product(range(k), repeat=m):
            if ok[max(mapped[i] for i in outcome)]:
                yield math.prod(probs[i] for i in outcome)

    return math.fsum(terms())


@dataclass(frozen=True)
class SweepError:
    index: int
    message: str


@dataclass
class SweepResult:
    reports: list[VerificationReport]
    errors: list[SweepError]


def sweep(
    configs: Sequence[Union[ExperimentConfig, Mapping[str, Any]]], workers: int = 1
) -> SweepResult:
    """Verify every config in order; invalid ones become error records instead of aborting."""
    reports, errors = [], []
    for i, cfg in enumerate(configs):
        try:
            if not isinstance(cfg, ExperimentConfig):
                cfg = ExperimentConfig.from_mapping(cfg)
            reports.append(verify_pac(cfg, workers=workers))
        except (ConfigError, measure.DistributionError, EnumerationBudgetError) as exc:
            errors.append(SweepError(i, str(exc)))
    return SweepResult(reports, errors)
