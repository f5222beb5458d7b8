"""Serialization of trial and verification reports.

Records are flat dicts written one JSON object per line; the same summary
fields make up the columns of the CSV table.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable

from .measure import format_literal
from .pac import SweepError, TrialReport, VerificationReport

SUMMARY_FIELDS = [
    "dist",
    "target",
    "epsilon",
    "delta",
    "m",
    "trials",
    "seed",
    "successes",
    "empirical_success",
    "exact_success",
    "bound",
    "guarantee_target",
    "min_sample_count",
    "sufficient_m",
    "slack",
    "always_succeed_branch",
    "theta",
    "failing_trials",
    "all_missed_violations",
    "miss_frequency",
    "miss_frequency_bound",
    "verdict_guarantee",
    "verdict_failure_bound",
    "verdict_exact",
    "verdict_all_missed",
    "verdict_miss_prob",
    "passed",
]


def summary_record(report: VerificationReport) -> dict:
    cfg = report.config
    rec = {
        "dist": format_literal(cfg.dist),
        "target": cfg.target,
        "epsilon": cfg.epsilon,
        "delta": cfg.delta,
        "m": cfg.m,
        "trials": cfg.trials,
        "seed": cfg.seed,
    }
    for name in SUMMARY_FIELDS[7:-1]:
        rec[name] = getattr(report, name)
    rec["passed"] = report.passed
    return rec


def trial_record(trial: TrialReport) -> dict:
    return {"trial_index": trial.trial_index, "chosen": trial.chosen, "err": trial.err, "success": trial.success}


def error_record(err: SweepError) -> dict:
    return {"index": err.index, "error": err.message}


def to_jsonl(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, allow_nan=False) + "\n" for r in records)


def to_table(reports: Iterable[VerificationReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow({k: ("" if v is None else v) for k, v in summary_record(r).items()})
    return buf.getvalue()


def _fmt(v) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, bool):
        return "PASS" if v else "FAIL"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def to_text(report: VerificationReport) -> str:
    cfg = report.config
    lines = [
        f"distribution      {format_literal(cfg.dist)}",
        f"target            {cfg.target:g}",
        f"eps / delta       {cfg.epsilon:g} / {cfg.delta:g}",
        f"m (examples)      {cfg.m}   (minimum for guarantee: {report.min_sample_count})",
        f"trials / seed     {cfg.trials} / {cfg.seed}",
        f"branch            {'always-succeed: P(0, t] <= eps' if report.always_succeed_branch else f'theta = {report.theta:.12g}'}",
        f"empirical success {report.empirical_success:.6f}  ({report.successes}/{cfg.trials})",
        f"exact success     {_fmt(report.exact_success)}",
        f"bound 1-(1-eps)^m {report.bound:.6f}",
        f"target 1-delta    {report.guarantee_target:.6f}   slack {report.slack:.6f}",
        f"guarantee         {_fmt(report.verdict_guarantee)}",
        f"failure bound     {_fmt(report.verdict_failure_bound)}",
        f"exact bound       {_fmt(report.verdict_exact)}",
        f"all_missed        {_fmt(report.verdict_all_missed)}  ({report.all_missed_violations} violations in {report.failing_trials} failing trials)",
        f"miss_prob         {_fmt(report.verdict_miss_prob)}  (freq {_fmt(report.miss_frequency)} <= {_fmt(report.miss_frequency_bound)})",
        f"verdict           {'PASS' if report.passed else 'FAIL'}",
    ]
    return "\n".join(lines) + "\n"
