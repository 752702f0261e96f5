"""Command-line interface: sweep, solve, verify, and report subcommands.

Configuration files are JSON documents with a ``problem`` section (the
problem serialization schema) plus sweep settings, e.g.::

    {
      "problem": {"n": 2000,
                  "generator": {"kind": "synthetic_diagonal",
                                 "params": {"a": 1.0, "u": 1.0, "tau": 0.5}},
                  "svals_rule": "l^-a",
                  "x_dag_rule": {"u": 1.0, "tau": 0.5},
                  "per_scale": [{"a": 1.0, "m": 1.0, "M": 1.0, "u_i": 1.0}]},
      "scale": {"s": 0.0, "family": {"kind": "tikhonov"}},
      "rule": {"kind": "natterer", "c": 1.0},
      "deltas": {"max_exp": -1.5, "min_exp": -4.5, "count": 7},
      "r": 0.0, "repeats": 5, "seed": 1234, "tol": 0.07
    }

Multi-scale configurations replace ``scale`` with the multi schema
({"s": [...], "eta": [...], "families": [...], "a": [...], "u": [...]}) and
``rule`` with {"kind": "scalar"|"vector"|"noise_plan", ...}.  Every
subcommand exits 0 exactly when all pass flags are true.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .experiments import (
    MultiRule,
    NoiseSpec,
    SweepConfig,
    emit_report,
    load_report,
    make_noise,
    run_sweep,
)
from .problems import problem_from_json
from .regularizers import RegFamily
from .scales_multi import MultiConfig, regularize_multi
from .scales_single import ParamRule, ScaleConfig, alpha_from_rule, error_r_norm, regularize
from .verify import standard_suite


def _load_config(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _deltas_from(doc) -> np.ndarray:
    if isinstance(doc, dict):
        return np.logspace(doc["max_exp"], doc["min_exp"], int(doc["count"]))
    return np.asarray(doc, dtype=float)


def _sweep_config(doc: dict) -> SweepConfig:
    problem = problem_from_json(doc["problem"])
    scale_doc = doc["scale"]
    if "eta" in scale_doc:
        scale = MultiConfig.from_json(scale_doc)
        rule_doc = doc["rule"]
        rule = MultiRule(
            kind=rule_doc["kind"],
            c=rule_doc.get("c", 1.0),
            epsilon=rule_doc.get("epsilon"),
        )
    else:
        scale = ScaleConfig(
            s=scale_doc["s"], family=RegFamily.from_json(scale_doc["family"])
        )
        rule_doc = doc["rule"]
        rule = ParamRule(
            kind=rule_doc["kind"],
            c=rule_doc.get("c", 1.0),
            epsilon=rule_doc.get("epsilon"),
        )
    kwargs = {}
    if "deltas" in doc:
        kwargs["deltas"] = _deltas_from(doc["deltas"])
    for key in ("r", "repeats", "seed", "tol", "debug"):
        if key in doc:
            kwargs[key] = doc[key]
    if "noise" in doc:
        kwargs["noise_mode"] = doc["noise"].get("mode", "gaussian")
        if "seed" in doc["noise"]:
            kwargs["seed"] = doc["noise"]["seed"]
    return SweepConfig(problem=problem, scale=scale, rule=rule, **kwargs)


def _cmd_sweep(args) -> int:
    cfg = _sweep_config(_load_config(args.config))
    report = run_sweep(cfg)
    emit_report(report, args.out, format=args.format)
    print(
        f"fitted order {report.fitted_order:.4f} vs theoretical "
        f"{report.theoretical_order:.4f} (tol {report.tol}): "
        f"{'PASS' if report.passed else 'FAIL'}; wrote {args.out}"
    )
    return 0 if report.passed else 1


def _cmd_solve(args) -> int:
    doc = _load_config(args.config)
    cfg = _sweep_config(doc)
    delta = float(args.delta)
    spec = NoiseSpec(cfg.noise_mode, int(args.seed))
    y_obs = make_noise(spec, cfg.problem.y, delta)
    if cfg.is_multi:
        from .scales_multi import optimal_eps_multi

        eps = cfg.rule.epsilon
        if eps is None:
            eps = optimal_eps_multi(cfg.scale).epsilon
        alpha = cfg.rule.c * delta**eps
        x = regularize_multi(cfg.problem, cfg.scale, alpha, y_obs)
        err = error_r_norm(cfg.problem, cfg.r, x)
    else:
        link, exact = cfg.problem.links[0], cfg.problem.exacts[0]
        alpha = alpha_from_rule(
            cfg.rule, delta, a=link.a, s=cfg.scale.s, u=exact.u, u_norm=exact.u_norm
        )
        x = regularize(cfg.problem, cfg.scale, alpha, y_obs)
        err = error_r_norm(cfg.problem, cfg.r, x)
    print(json.dumps({"delta": delta, "alpha": alpha, "error": err, "r": cfg.r}))
    return 0


def _cmd_verify(args) -> int:
    doc = _load_config(args.config)
    problem = problem_from_json(doc["problem"])
    reports = standard_suite(problem, trials=int(doc.get("trials", 1000)),
                             seed=int(doc.get("seed", 0)))
    width = max(len(rep.name) for rep in reports)
    all_ok = True
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        print(f"{rep.name:<{width}}  slack={rep.worst_slack: .3e}  "
              f"samples={rep.samples:<6d} {status}")
        all_ok &= rep.passed
    return 0 if all_ok else 1


def _cmd_report(args) -> int:
    report = load_report(args.infile)
    deltas, medians = report.median_errors()
    print("delta        median error")
    for d, e in zip(deltas, medians):
        print(f"{d:<12.4g} {e:.6g}")
    print(
        f"fitted order {report.fitted_order:.4f} vs theoretical "
        f"{report.theoretical_order:.4f} (tol {report.tol}): "
        f"{'PASS' if report.passed else 'FAIL'}"
    )
    return 0 if report.passed else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hilscale",
        description="Spectral regularization in Hilbert scales: sweeps and checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a delta sweep and write the report")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--format", choices=("csv", "json"), default="json")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_solve = sub.add_parser("solve", help="solve once at a given noise level")
    p_solve.add_argument("--config", required=True)
    p_solve.add_argument("--delta", required=True, type=float)
    p_solve.add_argument("--seed", default=0, type=int)
    p_solve.set_defaults(func=_cmd_solve)

    p_verify = sub.add_parser("verify", help="run the inequality suite")
    p_verify.add_argument("--config", required=True)
    p_verify.set_defaults(func=_cmd_verify)

    p_report = sub.add_parser("report", help="print fitted vs theoretical orders")
    p_report.add_argument("--in", dest="infile", required=True)
    p_report.set_defaults(func=_cmd_report)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
