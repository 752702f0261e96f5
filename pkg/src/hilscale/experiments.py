"""Noise generation, delta sweeps, order fitting, and report emission.

A sweep runs a grid of noise levels with several repeats each, chooses the
regularization parameter by the configured rule, records the error in the
requested norm, and fits the slope of log(median error) against log(delta).
Sweep cells are independent; set HILSCALE_THREADS to run them on a thread
pool (results are collected in deterministic order either way, so reports
are bit-identical for identical configurations).
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .problems import Problem
from .scales_multi import (
    MultiConfig,
    ObservationSet,
    multi_noise_plan,
    optimal_eps_multi,
    regularize_multi,
    regularize_multi_vec,
    sigma_star,
)
from .scales_single import (
    ParamRule,
    ScaleConfig,
    alpha_from_rule,
    error_r_norm,
    regularize,
    theoretical_order,
)
from .spectral_core import CoeffVector, scale_norm

__all__ = [
    "FitError",
    "SaturationError",
    "NoiseSpec",
    "MultiRule",
    "SweepConfig",
    "RateRecord",
    "RateReport",
    "make_noise",
    "fit_order",
    "theoretical_order_multi",
    "run_sweep",
    "emit_report",
    "load_report",
]

SATURATION_MARGIN = 10.0


class FitError(ValueError):
    """Order fitting is impossible on the given points."""


class SaturationError(ValueError):
    """The sweep would fit a truncation-saturated regime."""

    def __init__(self, message: str, min_delta: float):
        super().__init__(message)
        self.min_delta = min_delta


@dataclass(frozen=True)
class NoiseSpec:
    """Reproducible perturbation recipe: same (spec, delta, data) -> same noise."""

    mode: str = "gaussian"
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("gaussian", "tail"):
            raise ValueError(f"unknown noise mode: {self.mode!r}")


def make_noise(spec: NoiseSpec, y: CoeffVector, delta: float) -> CoeffVector:
    """Perturb y with noise of Euclidean norm exactly delta.

    gaussian: seeded standard-normal coefficients rescaled to norm delta;
    tail: delta times the last basis vector, the direction the
    unregularized inverse amplifies most.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    n = len(y)
    if spec.mode == "gaussian":
        rng = np.random.default_rng(np.random.SeedSequence([spec.seed]))
        e = rng.standard_normal(n)
        e *= delta / np.linalg.norm(e)
    else:
        e = np.zeros(n)
        e[-1] = delta
    return CoeffVector(y.coeffs + e)


@dataclass(frozen=True)
class MultiRule:
    """Parameter policy for multi-scale sweeps.

    ``scalar``: one alpha = c * delta**epsilon for all scales, epsilon
    defaulting to the optimal scalar exponent; ``vector``: per-scale
    optimal exponents with independent observations at the same level;
    ``noise_plan``: per-scale noise budget and parameters from the
    multi-level plan.
    """

    kind: str
    c: float = 1.0
    epsilon: float | None = None

    def __post_init__(self):
        if self.kind not in ("scalar", "vector", "noise_plan"):
            raise ValueError(f"unknown multi rule kind: {self.kind!r}")
        if self.c <= 0:
            raise ValueError("need c > 0")

    def to_json(self) -> dict:
        doc = {"kind": self.kind, "c": self.c}
        if self.epsilon is not None:
            doc["epsilon"] = self.epsilon
        return doc


def default_deltas() -> np.ndarray:
    return 10.0 ** (-np.linspace(1.5, 4.5, 7))


@dataclass(frozen=True, eq=False)
class SweepConfig:
    """Everything a sweep needs; immutable and fully seeded.

    ``debug`` selects reduced sweeps: "reg_only" feeds exact data (the
    rule still sees delta), "noise_only" feeds pure noise around y = 0 and
    records the norm of the reconstruction itself.
    """

    problem: Problem
    scale: ScaleConfig | MultiConfig
    rule: ParamRule | MultiRule
    deltas: np.ndarray = field(default_factory=default_deltas)
    r: float = 0.0
    repeats: int = 5
    noise_mode: str = "gaussian"
    seed: int = 0
    tol: float = 0.07
    debug: str | None = None

    def __post_init__(self):
        deltas = np.asarray(self.deltas, dtype=float)
        object.__setattr__(self, "deltas", deltas)
        if deltas.size < 6:
            raise ValueError("need at least 6 noise levels")
        if np.any(np.diff(deltas) >= 0):
            raise ValueError("deltas must be strictly decreasing")
        if np.any(deltas[1:] / deltas[:-1] > 10.0**-0.5 * (1.0 + 1e-9)):
            raise ValueError("each step must decrease delta by at least 10**0.5")
        if self.repeats < 1:
            raise ValueError("need repeats >= 1")
        if self.debug not in (None, "reg_only", "noise_only"):
            raise ValueError(f"unknown debug mode: {self.debug!r}")
        if isinstance(self.scale, MultiConfig) and not isinstance(self.rule, MultiRule):
            raise ValueError("multi-scale sweeps need a MultiRule")
        if isinstance(self.scale, ScaleConfig) and not isinstance(self.rule, ParamRule):
            raise ValueError("single-scale sweeps need a ParamRule")

    @property
    def is_multi(self) -> bool:
        return isinstance(self.scale, MultiConfig)


@dataclass(frozen=True)
class RateRecord:
    delta: float
    repeat: int
    alpha: float
    error: float
    r: float


@dataclass(frozen=True, eq=False)
class RateReport:
    """Sweep records plus the fitted and theoretical convergence orders."""

    records: tuple[RateRecord, ...]
    fitted_order: float
    theoretical_order: float
    residual: float
    tol: float
    passed: bool

    def median_errors(self) -> tuple[np.ndarray, np.ndarray]:
        deltas = sorted({rec.delta for rec in self.records}, reverse=True)
        meds = [
            float(np.median([rec.error for rec in self.records if rec.delta == d]))
            for d in deltas
        ]
        return np.asarray(deltas), np.asarray(meds)


def fit_order(points) -> tuple[float, float]:
    """Ordinary least squares on (log delta, log error) pairs.

    Returns (slope, rms of residuals).  Fewer than 3 points or degenerate
    abscissae are a FitError.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise FitError("need at least 3 points")
    x, y = pts[:, 0], pts[:, 1]
    if np.ptp(x) <= 0:
        raise FitError("degenerate abscissae")
    slope, intercept = np.polyfit(x, y, 1)
    rms = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), rms


def theoretical_order_multi(cfg: MultiConfig, epsilon: float | None = None) -> float:
    """Order of the scalar multi-scale rule: min over scales of the
    per-scale order, or sigma_c when epsilon is the optimal one."""
    if epsilon is None:
        return optimal_eps_multi(cfg).sigma_c
    return min(
        theoretical_order(a, s, u, r=0.0, epsilon=epsilon)
        for a, s, u in zip(cfg.a_vec, cfg.s_vec, cfg.u_vec)
    )


def _cell_seed(base: int, i_delta: int, repeat: int, scale: int = 0) -> int:
    seq = np.random.SeedSequence([base, i_delta, repeat, scale])
    return int(seq.generate_state(1)[0])


def _expected_order(cfg: SweepConfig) -> float:
    if cfg.is_multi:
        mc = cfg.scale
        if cfg.rule.kind == "scalar":
            return theoretical_order_multi(mc, cfg.rule.epsilon)
        if cfg.rule.kind == "vector":
            return sigma_star(mc)
        return multi_noise_plan(mc, delta=0.5, c=cfg.rule.c).sigma_hat
    link, exact = cfg.problem.links[0], cfg.problem.exacts[0]
    a, s, u = link.a, cfg.scale.s, exact.u
    eps = cfg.rule.epsilon  # None for the smoothness-aware rule
    if cfg.debug == "reg_only":
        eps_eff = 2.0 * (a + s) / (a + u) if eps is None else eps
        return eps_eff * (u - cfg.r) / (2.0 * (a + s))
    if cfg.debug == "noise_only":
        eps_eff = 2.0 * (a + s) / (a + u) if eps is None else eps
        return 1.0 - eps_eff * (a + cfg.r) / (2.0 * (a + s))
    return theoretical_order(a, s, u, r=cfg.r, epsilon=eps)


def _run_single_cell(cfg: SweepConfig, i_delta: int, repeat: int) -> RateRecord:
    problem = cfg.problem
    delta = float(cfg.deltas[i_delta])
    link, exact = problem.links[0], problem.exacts[0]
    alpha = alpha_from_rule(
        cfg.rule, delta, a=link.a, s=cfg.scale.s, u=exact.u, u_norm=exact.u_norm
    )
    if cfg.debug == "reg_only":
        y_obs = problem.y
    else:
        base = problem.y if cfg.debug is None else CoeffVector(np.zeros(problem.n))
        spec = NoiseSpec(cfg.noise_mode, _cell_seed(cfg.seed, i_delta, repeat))
        y_obs = make_noise(spec, base, delta)
    x = regularize(problem, cfg.scale, alpha, y_obs)
    if cfg.debug == "noise_only":
        err = scale_norm(problem.operators[0], cfg.r, x)
    else:
        err = error_r_norm(problem, cfg.r, x)
    return RateRecord(delta=delta, repeat=repeat, alpha=alpha, error=err, r=cfg.r)


def _run_multi_cell(cfg: SweepConfig, i_delta: int, repeat: int) -> RateRecord:
    problem, mc, rule = cfg.problem, cfg.scale, cfg.rule
    delta = float(cfg.deltas[i_delta])
    n_scales = mc.num_scales

    def noisy(scale: int, level: float) -> CoeffVector:
        spec = NoiseSpec(cfg.noise_mode, _cell_seed(cfg.seed, i_delta, repeat, scale))
        return make_noise(spec, problem.y, level)

    if rule.kind == "scalar":
        eps = optimal_eps_multi(mc).epsilon if rule.epsilon is None else rule.epsilon
        alpha = rule.c * delta**eps
        x = regularize_multi(problem, mc, alpha, noisy(0, delta))
        rec_alpha = alpha
    elif rule.kind == "vector":
        alphas = tuple(
            rule.c * delta ** (2.0 * (a + s) / (a + u))
            for a, s, u in zip(mc.a_vec, mc.s_vec, mc.u_vec)
        )
        obs = ObservationSet(
            obs=tuple(noisy(i, delta) for i in range(n_scales)),
            deltas=(delta,) * n_scales,
        )
        x = regularize_multi_vec(problem, mc, alphas, obs)
        rec_alpha = alphas[0]
    else:
        plan = multi_noise_plan(mc, delta, c=rule.c)
        obs = ObservationSet(
            obs=tuple(noisy(i, plan.deltas[i]) for i in range(n_scales)),
            deltas=plan.deltas,
        )
        x = regularize_multi_vec(problem, mc, plan.alphas, obs)
        rec_alpha = plan.alphas[0]
    err = scale_norm(problem.operators[0], cfg.r, x - problem.x_dag)
    return RateRecord(delta=delta, repeat=repeat, alpha=rec_alpha, error=err, r=cfg.r)


def run_sweep(cfg: SweepConfig) -> RateReport:
    """Run the sweep, fit the order, and compare with the theoretical one.

    Raises SaturationError (reporting the smallest usable delta) when the
    expected error at the smallest level is not safely above the problem's
    truncation tail energy.
    """
    cells = [(i, rep) for i in range(len(cfg.deltas)) for rep in range(cfg.repeats)]
    runner = _run_multi_cell if cfg.is_multi else _run_single_cell
    workers = int(os.environ.get("HILSCALE_THREADS", "1") or "1")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda c: runner(cfg, *c), cells))
    else:
        records = [runner(cfg, i, rep) for i, rep in cells]

    sigma = _expected_order(cfg)
    by_delta = {}
    for rec in records:
        by_delta.setdefault(rec.delta, []).append(rec.error)
    deltas = np.asarray(sorted(by_delta, reverse=True))
    medians = np.asarray([np.median(by_delta[d]) for d in deltas])

    # The floor guard protects total-error fits; debug sweeps do not
    # measure distance to the exact solution, so it does not apply there.
    tail = cfg.problem.tail_energy(cfg.r) if cfg.debug is None else 0.0
    if cfg.debug is None and sigma > 0 and medians[0] > 0:
        c_est = medians[0] / deltas[0] ** sigma
        floor = SATURATION_MARGIN * tail
        if c_est * deltas[-1] ** sigma <= floor:
            min_delta = (floor / c_est) ** (1.0 / sigma)
            raise SaturationError(
                f"expected error at delta={deltas[-1]:.3g} sits at the truncation "
                f"floor; use delta >= {min_delta:.3g}",
                min_delta=min_delta,
            )

    fitted, rms = fit_order(np.column_stack([np.log(deltas), np.log(medians)]))
    return RateReport(
        records=tuple(records),
        fitted_order=fitted,
        theoretical_order=sigma,
        residual=rms,
        tol=cfg.tol,
        passed=bool(abs(fitted - sigma) <= cfg.tol),
    )


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _render_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        items = ",\n".join(
            f'{pad}  "{k}": {_render_json(v, indent + 1).lstrip()}' for k, v in obj.items()
        )
        return f"{pad}{{\n{items}\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        items = ",\n".join(f"{pad}  {_render_json(v, indent + 1).lstrip()}" for v in obj)
        return f"{pad}[\n{items}\n{pad}]"
    if isinstance(obj, bool):
        return pad + ("true" if obj else "false")
    if isinstance(obj, float):
        return pad + _fmt(obj)
    if isinstance(obj, int):
        return pad + str(obj)
    return pad + json.dumps(obj)


def report_to_json(report: RateReport) -> dict:
    return {
        "records": [
            {
                "delta": rec.delta,
                "repeat": rec.repeat,
                "alpha": rec.alpha,
                "error": rec.error,
                "r": rec.r,
            }
            for rec in report.records
        ],
        "fitted_order": report.fitted_order,
        "theoretical_order": report.theoretical_order,
        "residual": report.residual,
        "tol": report.tol,
        "pass": report.passed,
    }


def emit_report(report: RateReport, path, format: str = "json") -> None:
    """Write the report; CSV columns are exactly delta,repeat,alpha,error,r.

    All numbers are rendered with 17 significant digits, which round-trips
    doubles exactly.
    """
    path = os.fspath(path)
    try:
        if format == "csv":
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["delta", "repeat", "alpha", "error", "r"])
                for rec in report.records:
                    writer.writerow(
                        [_fmt(rec.delta), rec.repeat, _fmt(rec.alpha), _fmt(rec.error), _fmt(rec.r)]
                    )
        elif format == "json":
            with open(path, "w") as fh:
                fh.write(_render_json(report_to_json(report)) + "\n")
        else:
            raise ValueError(f"unknown format: {format!r}")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def load_report(path) -> RateReport:
    """Read back a JSON report emitted by emit_report."""
    path = os.fspath(path)
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read report from {path}: {exc}") from exc
    records = tuple(
        RateRecord(
            delta=rec["delta"],
            repeat=int(rec["repeat"]),
            alpha=rec["alpha"],
            error=rec["error"],
            r=rec["r"],
        )
        for rec in doc["records"]
    )
    return RateReport(
        records=records,
        fitted_order=doc["fitted_order"],
        theoretical_order=doc["theoretical_order"],
        residual=doc["residual"],
        tol=doc["tol"],
        passed=bool(doc["pass"]),
    )
