"""Acceptance gate: one test per exit criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the verdict lines are
written straight to the terminal.
"""

import math
import time

import numpy as np
import pytest

from stumplab.learner import choose, label_sample
from stumplab.measure import Atom, Distribution, Icc, Ioc, Uniform, atom, bernoulli, measure_interval, sample_vector, uniform
from stumplab.pac import ExperimentConfig, complexity, exact_success_probability, min_sample_count, verify_pac
from stumplab.reports import summary_record, to_jsonl
from stumplab.theta import certify_theta, exact_theta_exists

from conftest import random_mixture, theta_cases

THIRDS = Distribution.of((1 / 3, Atom(0.1)), (1 / 3, Atom(0.3)), (1 / 3, Atom(0.6)))
C4 = ExperimentConfig(uniform(0, 1), 0.5, 0.1, 0.1, 22, 20000, seed=7)


@pytest.fixture
def verdict(capsys):
    def emit(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        assert ok, detail

    return emit


@pytest.fixture(scope="module")
def c4_run():
    t0 = time.perf_counter()
    report = verify_pac(C4)
    return report, time.perf_counter() - t0


def test_c1_choose_properties(verdict):
    rng = np.random.default_rng(101)
    families = [("atom",), ("uniform",), ("exp",), ("atom", "uniform", "exp")]
    t0 = time.perf_counter()
    cases = violations = 0
    for i in range(10_000):
        dist = random_mixture(rng, families[i % len(families)])
        t = float(rng.uniform(0, 2)) if rng.random() < 0.8 else float(rng.integers(0, 21)) / 10
        labeled = label_sample(t, sample_vector(dist, int(rng.integers(1, 30)), rng))
        h = choose(labeled)
        if not h <= t:
            violations += 1
        if any(p > h for p, lab in labeled if lab):
            violations += 1
        cases += 1
    elapsed = time.perf_counter() - t0
    verdict("C1 choose_property_1/2", violations == 0 and elapsed < 5.0,
            f"{cases} cases, {violations} violations, {elapsed:.2f}s (< 5s)")


def test_c2_theta_certificates(verdict):
    cases = theta_cases(1000, 202)
    t0 = time.perf_counter()
    bad = [c for c in cases if not certify_theta(*c).ok]
    elapsed = time.perf_counter() - t0
    verdict("C2 theta certificate", not bad and elapsed < 10.0,
            f"{len(cases)} mixtures, {len(bad)} failing certificates, tol 1e-9, {elapsed:.2f}s (< 10s)")


def test_c3_counterexample(verdict):
    dist = bernoulli(0.5)
    cert = certify_theta(dist, 0.5, 0.25)
    exact = exact_theta_exists(dist, 0.5, 0.25)
    lower = measure_interval(dist, Icc(0.0, 0.5))
    upper = measure_interval(dist, Ioc(0.0, 0.5))
    ok = exact is None and cert.theta == 0.0 and lower == 0.5 and upper == 0.0
    ok = ok and cert.lower_measure == 0.5 and cert.upper_measure == 0.0 and cert.ok
    verdict("C3 counterexample", ok,
            f"exact={exact}, theta={cert.theta!r}, P[0,0.5]={lower!r}, P(0,0.5]={upper!r} (bit-exact)")


def test_c4_continuous_guarantee(verdict, c4_run):
    report, elapsed = c4_run
    p = 1 - 0.9**22
    T = C4.trials
    within = abs(report.empirical_success - p) <= 4 * math.sqrt(p * (1 - p) / T)
    above = report.empirical_success >= 1 - 0.1 - 4 * math.sqrt(0.1 * 0.9 / T)
    verdict("C4 continuous guarantee", within and above and elapsed < 30.0,
            f"empirical {report.empirical_success:.5f} vs closed form {p:.5f} "
            f"(4σ={4 * math.sqrt(p * (1 - p) / T):.5f}), floor {1 - 0.1 - 4 * math.sqrt(0.09 / T):.5f}, {elapsed:.2f}s (< 30s)")


def test_c5_discrete_guarantee(verdict):
    p2 = exact_success_probability(THIRDS, 0.4, 2, 0.25)
    m = min_sample_count(0.25, 0.1)
    pm = exact_success_probability(THIRDS, 0.4, m, 0.25)
    ok = abs(p2 - 5 / 9) <= 1e-12 and pm >= 0.9
    verdict("C5 exact guarantee", ok, f"m=2: {p2!r} vs 5/9 (tol 1e-12); m={m}: {pm!r} >= 0.9")


def test_c6_always_succeed(verdict):
    configs = [
        ExperimentConfig(atom(0.9), 0.5, 0.1, 0.1, 5, 2000, seed=1),
        ExperimentConfig(bernoulli(0.5), 0.5, 0.25, 0.1, 9, 2000, seed=2),
        ExperimentConfig(Distribution.of((0.08, Uniform(0, 0.5)), (0.92, Atom(0.9))), 0.5, 0.1, 0.1, 3, 2000, seed=3),
        ExperimentConfig(Distribution.of((0.5, Atom(0.0)), (0.05, Uniform(0, 1)), (0.45, Atom(2.0))), 1.0, 0.06, 0.2,
                         4, 2000, seed=4),
    ]
    results = []
    for cfg in configs:
        assert measure_interval(cfg.dist, Ioc(0, cfg.target)) <= cfg.epsilon
        results.append(verify_pac(cfg).empirical_success)
    verdict("C6 always_succeed", all(r == 1.0 for r in results),
            f"{len(configs)} configs with P(0,t] <= eps, empirical success {results}")


def test_c7_complexity(verdict):
    bad = []
    for eps in np.linspace(0.02, 0.9, 10):
        for delta in np.linspace(0.01, 0.8, 10):
            eps, delta = float(eps), float(delta)
            m = min_sample_count(eps, delta)
            if not (1 - eps) ** m <= delta < (1 - eps) ** (m - 1):
                bad.append((eps, delta, m))
    spot = complexity(0.1, 0.1)
    ok = not bad and abs(spot - 20.8543) <= 5e-4
    verdict("C7 complexity", ok, f"100 grid pairs, {len(bad)} off-by-one; complexity(0.1,0.1)={spot:.6f}")


def test_c8_all_missed_and_miss_prob(verdict, c4_run):
    report, _ = c4_run
    T, m, eps = C4.trials, C4.m, C4.epsilon
    p_fail = 0.9**22
    fail_freq = report.failing_trials / T
    fail_ok = fail_freq <= p_fail + 4 * math.sqrt(p_fail * (1 - p_fail) / T)
    bound = 1 - eps + 4 * math.sqrt(eps * (1 - eps) / (T * m))
    ok = (report.failing_trials > 0 and report.all_missed_violations == 0 and report.miss_frequency <= bound
          and fail_ok)
    verdict("C8 all_missed / miss_prob", ok,
            f"theta={report.theta:.6f}, {report.all_missed_violations} all_missed violations in "
            f"{report.failing_trials} failing trials; miss freq {report.miss_frequency:.5f} <= {bound:.5f}; "
            f"failure freq {fail_freq:.5f} <= (1-eps)^m + 4σ")


def test_c9_determinism(verdict, c4_run):
    base = to_jsonl([summary_record(c4_run[0])])
    again = to_jsonl([summary_record(verify_pac(C4, workers=1))])
    parallel = to_jsonl([summary_record(verify_pac(C4, workers=4))])
    verdict("C9 determinism", base == again == parallel,
            f"summary records byte-identical across reruns and 1 vs 4 workers ({len(base)} bytes)")
