"""Command line driver.

    stumplab verify   --dist 'uniform{0,1}:1' --target 0.5 --eps 0.1 --delta 0.1 --m auto --trials 20000 --seed 7
    stumplab theta    --dist 'atom{0}:0.5,atom{1}:0.5' --target 0.5 --eps 0.25
    stumplab complexity --eps 0.1 --delta 0.1
    stumplab counterexample [--eps 0.25]
    stumplab enumerate --dist 'atom{0.1}:1/3,atom{0.3}:1/3,atom{0.6}:1/3' --target 0.4 --m 2 --eps 0.25
    stumplab sweep    --config grid.yaml

Exit status: 0 when every verdict passes, 1 when a bound check fails, 2 on
usage or configuration errors.  If ``STUMPLAB_OUTPUT_DIR`` is set and no
``--output`` is given, output goes to ``$STUMPLAB_OUTPUT_DIR/<command>.<ext>``.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import yaml

from . import measure, reports
from .measure import DistributionError, Ioc, bernoulli, format_literal, measure_interval
from .pac import (
    ConfigError,
    EnumerationBudgetError,
    ExperimentConfig,
    complexity,
    exact_success_probability,
    min_sample_count,
    sweep,
    verify_pac,
)
from .theta import ThetaPreconditionError, certify_theta, exact_theta_exists

OUTPUT_DIR_ENV = "STUMPLAB_OUTPUT_DIR"
EXIT_OK, EXIT_VERDICT, EXIT_USAGE = 0, 1, 2
_EXT = {"text": "txt", "records": "jsonl", "table": "csv"}


class UsageError(Exception):
    pass


def _unit_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    return v


def _sample_count(text: str):
    if text.strip().lower() == "auto":
        return "auto"
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is neither a positive integer nor 'auto'") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive integer")
    return v


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=sorted(_EXT), default="text", help="output format (default: text)")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stumplab", description="PAC learnability lab for decision stumps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="Monte-Carlo check of the (eps, delta) guarantee")
    p.add_argument("--config", help="YAML/JSON file with ExperimentConfig fields; flags override it")
    p.add_argument("--dist", help="distribution literal, e.g. 'uniform{0,1}:1'")
    p.add_argument("--target", type=float)
    p.add_argument("--eps", type=_unit_float)
    p.add_argument("--delta", type=_unit_float)
    p.add_argument("--m", type=_sample_count, help="training examples per trial, or 'auto'")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--trial-records", action="store_true", help="with --format records, also emit one record per trial")
    _add_output(p)

    p = sub.add_parser("theta", help="supremum cut point and its certificate")
    p.add_argument("--dist", required=True)
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--eps", type=_unit_float, required=True)
    _add_output(p)

    p = sub.add_parser("complexity", help="sample complexity for (eps, delta)")
    p.add_argument("--eps", type=_unit_float, required=True)
    p.add_argument("--delta", type=_unit_float, required=True)
    _add_output(p)

    p = sub.add_parser("counterexample", help="fair Bernoulli scenario where no exact cut point exists")
    p.add_argument("--eps", type=_unit_float, default=0.25)
    p.add_argument("--delta", type=_unit_float, default=0.1)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("enumerate", help="exact success probability for an atomic distribution")
    p.add_argument("--dist", required=True)
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--eps", type=_unit_float, required=True)
    p.add_argument("--m", type=_sample_count, required=True)
    p.add_argument("--delta", type=_unit_float, help="needed only for --m auto")
    p.add_argument("--budget", type=int, default=10**7)
    _add_output(p)

    p = sub.add_parser("sweep", help="verify a grid of configs")
    p.add_argument("--config", required=True, help="YAML/JSON with 'configs: [...]' or 'base' + 'grid'")
    p.add_argument("--workers", type=int, default=1)
    _add_output(p)
    return parser


def _load_file(path: str):
    try:
        with open(path) as fh:
            return yaml.safe_load(fh)
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise UsageError(f"config: {path} is not valid YAML/JSON: {exc}") from None


def _dist(text: str) -> measure.Distribution:
    try:
        return measure.parse_literal(text)
    except DistributionError as exc:
        raise UsageError(f"--dist: {exc}") from None


def _cert_line(exact, cert) -> str:
    ex = "none" if exact is None else f"{exact:.12g}"
    return (
        f"exact θ: {ex}; sup θ = {cert.theta:.12g}; "
        f"μ[θ,t]={cert.lower_measure:.12g} {'≥' if cert.lower_ok else '<'} {cert.epsilon:g}; "
        f"μ(θ,t]={cert.upper_measure:.12g} {'≤' if cert.upper_ok else '>'} {cert.epsilon:g}"
    )


def _emit_records(fmt: str, records: list[dict], text: str) -> str:
    if fmt == "records":
        return reports.to_jsonl(records)
    if fmt == "table":
        fields = list(records[0]) if records else []
        rows = [",".join(fields)]
        rows += [",".join("" if r.get(k) is None else str(r.get(k)) for k in fields) for r in records]
        return "\n".join(rows) + "\n"
    return text


def cmd_verify(args) -> tuple[str, int]:
    data = {}
    if args.config:
        loaded = _load_file(args.config)
        if not isinstance(loaded, dict):
            raise UsageError(f"config: {args.config} must hold a mapping of ExperimentConfig fields")
        data.update(loaded)
    overrides = {
        "dist": args.dist, "target": args.target, "epsilon": args.eps, "delta": args.delta,
        "m": args.m, "trials": args.trials, "seed": args.seed,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if "eps" in data:
        data.setdefault("epsilon", data.pop("eps"))
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    cfg = ExperimentConfig.from_mapping(data)
    report = verify_pac(cfg, workers=args.workers, keep_trials=args.trial_records)
    if args.format == "records":
        recs = [reports.summary_record(report)]
        if args.trial_records:
            recs += [reports.trial_record(t) for t in report.trials]
        out = reports.to_jsonl(recs)
    elif args.format == "table":
        out = reports.to_table([report])
    else:
        out = reports.to_text(report)
    return out, EXIT_OK if report.passed else EXIT_VERDICT


def cmd_theta(args) -> tuple[str, int]:
    dist = _dist(args.dist)
    cert = certify_theta(dist, args.target, args.eps)
    exact = exact_theta_exists(dist, args.target, args.eps)
    rec = {"dist": format_literal(dist), "target": args.target, "exact_theta": exact, **cert.as_dict()}
    return _emit_records(args.format, [rec], _cert_line(exact, cert) + "\n"), EXIT_OK if cert.ok else EXIT_VERDICT


def cmd_complexity(args) -> tuple[str, int]:
    c = complexity(args.eps, args.delta)
    m = min_sample_count(args.eps, args.delta)
    rec = {"epsilon": args.eps, "delta": args.delta, "complexity": c, "min_sample_count": m,
           "failure_bound": (1.0 - args.eps) ** m}
    text = f"complexity {c:.4f}\nm {m}\n"
    return _emit_records(args.format, [rec], text), EXIT_OK


def cmd_counterexample(args) -> tuple[str, int]:
    dist, target, eps = bernoulli(0.5), 0.5, args.eps
    exact = exact_theta_exists(dist, target, eps)
    head = measure_interval(dist, Ioc(0.0, target))
    rec = {"dist": format_literal(dist), "target": target, "epsilon": eps, "exact_theta": exact,
           "open_head_measure": head, "always_succeed_branch": head <= eps}
    lines = []
    ok = True
    try:
        cert = certify_theta(dist, target, eps)
    except ThetaPreconditionError:
        ex = "none" if exact is None else f"{exact:.12g}"
        lines.append(f"exact θ: {ex}; μ[0,t] ≤ {eps:g}, no cut point needed")
    else:
        rec.update(cert.as_dict())
        lines.append(_cert_line(exact, cert))
        ok = cert.ok
    if head <= eps:
        lines.append(f"μ(0,t]={head:g} ≤ {eps:g}: always-succeed branch")
    m = min_sample_count(eps, args.delta)
    cfg = ExperimentConfig(dist, target, eps, args.delta, m, args.trials, args.seed).check()
    report = verify_pac(cfg)
    rec.update({"m": m, "empirical_success": report.empirical_success, "exact_success": report.exact_success,
                "bound": report.bound, "verify_passed": report.passed})
    lines.append(
        f"verify: m={m}, empirical success {report.empirical_success:.4f}, exact success "
        f"{report.exact_success:.6f} ≥ 1-δ={1 - args.delta:g}: {'PASS' if report.passed else 'FAIL'}"
    )
    ok = ok and report.passed
    return _emit_records(args.format, [rec], "\n".join(lines) + "\n"), EXIT_OK if ok else EXIT_VERDICT


def cmd_enumerate(args) -> tuple[str, int]:
    dist = _dist(args.dist)
    if not dist.is_atomic:
        raise UsageError("--dist: enumeration needs a purely atomic distribution")
    m = args.m
    if m == "auto":
        if args.delta is None:
            raise UsageError("--m auto needs --delta")
        m = min_sample_count(args.eps, args.delta)
    p = exact_success_probability(dist, args.target, m, args.eps, budget=args.budget)
    bound = 1.0 - (1.0 - args.eps) ** m
    ok = p >= bound - 1e-12 and (args.delta is None or m < min_sample_count(args.eps, args.delta)
                                 or p >= 1.0 - args.delta)
    rec = {"dist": format_literal(dist), "target": args.target, "epsilon": args.eps, "m": m,
           "exact_success": p, "bound": bound, "passed": ok}
    text = f"exact success {p:.12g} (m={m}); bound 1-(1-eps)^m = {bound:.12g}: {'PASS' if ok else 'FAIL'}\n"
    return _emit_records(args.format, [rec], text), EXIT_OK if ok else EXIT_VERDICT


def _sweep_configs(spec) -> list:
    if isinstance(spec, list):
        return spec
    if not isinstance(spec, dict):
        raise UsageError("config: sweep file must be a list of configs or a mapping")
    if "configs" in spec:
        return list(spec["configs"])
    base = dict(spec.get("base", {}))
    grid = spec.get("grid", {})
    if not isinstance(grid, dict) or not grid:
        raise UsageError("config: sweep file needs 'configs' or a non-empty 'grid'")
    keys = list(grid)
    return [{**base, **dict(zip(keys, combo))} for combo in itertools.product(*(grid[k] for k in keys))]


def cmd_sweep(args) -> tuple[str, int]:
    configs = _sweep_configs(_load_file(args.config))
    result = sweep(configs, workers=args.workers)
    if args.format == "records":
        out = reports.to_jsonl([reports.summary_record(r) for r in result.reports]
                               + [reports.error_record(e) for e in result.errors])
    elif args.format == "table":
        out = reports.to_table(result.reports)
    else:
        out = "\n".join(reports.to_text(r) for r in result.reports)
        out += "".join(f"config {e.index}: error: {e.message}\n" for e in result.errors)
    if result.errors:
        for e in result.errors:
            print(f"stumplab: config {e.index}: {e.message}", file=sys.stderr)
        return out, EXIT_USAGE
    return out, EXIT_OK if all(r.passed for r in result.reports) else EXIT_VERDICT


COMMANDS = {
    "verify": cmd_verify,
    "theta": cmd_theta,
    "complexity": cmd_complexity,
    "counterexample": cmd_counterexample,
    "enumerate": cmd_enumerate,
    "sweep": cmd_sweep,
}


def _write(args, text: str) -> None:
    path: Optional[Path] = Path(args.output) if args.output else None
    if path is None and os.environ.get(OUTPUT_DIR_ENV):
        path = Path(os.environ[OUTPUT_DIR_ENV]) / f"{args.command}.{_EXT[args.format]}"
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, status = COMMANDS[args.command](args)
    except (UsageError, ConfigError, DistributionError, ThetaPreconditionError, EnumerationBudgetError) as exc:
        print(f"stumplab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"stumplab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        _write(args, text)
    except OSError as exc:
        print(f"stumplab {args.command}: error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return status


if __name__ == "__main__":
    sys.exit(main())
