"""Numerical certification of structural inequalities on built problems.

Each check draws seeded random samples (one RNG stream per trial index, so
trials could run concurrently without changing results) and reports the
worst slack seen.  Slacks are dimensionless: inequalities are evaluated in
ratio form after normalizing the sampled vectors, and a check passes when
the worst slack is no worse than -1e-10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problems import Problem
from .spectral_core import CoeffVector, ScaleOperator, power_factors, scale_norm

__all__ = [
    "SLACK_TOL",
    "IneqReport",
    "norm_equivalence",
    "power_range_check",
    "heinz_check",
    "source_condition_check",
    "interpolation_check",
    "standard_suite",
]

SLACK_TOL = -1e-10


@dataclass(frozen=True)
class IneqReport:
    """Worst slack over all samples of one inequality check.

    ``passed`` is equivalent to worst_slack >= -1e-10.  JSON uses the key
    "pass" (a reserved word in Python).
    """

    name: str
    worst_slack: float
    samples: int
    passed: bool

    @classmethod
    def from_slack(cls, name: str, worst_slack: float, samples: int) -> "IneqReport":
        return cls(
            name=name,
            worst_slack=float(worst_slack),
            samples=samples,
            passed=bool(worst_slack >= SLACK_TOL),
        )

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "worst_slack": self.worst_slack,
            "samples": self.samples,
            "pass": self.passed,
        }


def _rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def _unit_sample(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def norm_equivalence(problem: Problem, scale_index: int = 0) -> tuple[float, float]:
    """Extremal ratios sigma_j * l_j**a over the basis.

    In the diagonal case the basis vectors are extremal over all of X, so
    these are the sharp constants (m, M) of the smoothing link; both equal
    1 for the built-in problems.
    """
    L, link, _ = problem.scale(scale_index)
    ratios = problem.T.svals * power_factors(L, link.a)
    return float(np.min(ratios)), float(np.max(ratios))


def power_range_check(
    problem: Problem,
    s: float,
    nu: float,
    trials: int = 1000,
    seed: int = 0,
    scale_index: int = 0,
) -> IneqReport:
    """Two-sided norm bound for powers of B*B against the scale norm.

    For random unit x the ratio ||(B*B)**(nu/2) x|| / ||x||_{-nu(a+s)} must
    lie in [m**nu, M**nu]; values nu > 1 are admissible here because all
    built problems are simultaneously diagonal.  nu = 0 is the identity.
    """
    if nu < 0:
        raise ValueError("need nu >= 0")
    L, link, _ = problem.scale(scale_index)
    m_est, M_est = norm_equivalence(problem, scale_index)
    b2 = (problem.T.svals * power_factors(L, -s)) ** 2
    num_f = np.exp(0.5 * nu * np.log(b2))
    den_f = power_factors(L, -nu * (link.a + s))
    lo, hi = m_est**nu, M_est**nu
    worst = math.inf
    n = problem.n
    for trial in range(trials):
        x = _unit_sample(_rng(seed, trial), n)
        ratio = np.linalg.norm(num_f * x) / np.linalg.norm(den_f * x)
        worst = min(worst, ratio - lo, hi - ratio)
    return IneqReport.from_slack(
        f"power_range nu={nu} s={s} scale={scale_index}", worst, trials
    )


def heinz_check(A_eigs, L_eigs, nu_grid, trials: int = 1000, seed: int = 0) -> IneqReport:
    """Power monotonicity of the norm domination ||L x|| <= ||A x||.

    Requires the hypothesis elementwise: 1 <= l_j <= a_j (rejected
    otherwise, since there is nothing to certify).  For commuting diagonal
    pairs the conclusion extends beyond nu = 1, so the grid may include
    larger exponents.  Slack is 1 - ||L**nu x|| / ||A**nu x|| per sample.
    """
    A = np.asarray(A_eigs, dtype=float)
    L = np.asarray(L_eigs, dtype=float)
    if A.shape != L.shape or A.ndim != 1:
        raise ValueError("eigenvalue sequences must be 1-d and of equal length")
    if np.any(L < 1.0) or np.any(A < 1.0):
        raise ValueError("sample class requires all eigenvalues >= 1")
    if np.any(L > A):
        raise ValueError("hypothesis ||L x|| <= ||A x|| fails elementwise; nothing to certify")
    worst = math.inf
    count = 0
    for nu in nu_grid:
        if nu < 0:
            raise ValueError("need nu >= 0")
        an = np.exp(nu * np.log(A))
        ln = np.exp(nu * np.log(L))
        for trial in range(trials):
            x = _unit_sample(_rng(seed, trial), A.size)
            worst = min(worst, 1.0 - np.linalg.norm(ln * x) / np.linalg.norm(an * x))
            count += 1
    return IneqReport.from_slack(f"heinz nu_grid={list(nu_grid)}", worst, count)


def source_condition_check(
    problem: Problem, s: float, u: float, scale_index: int = 0
) -> tuple[float, bool]:
    """Representer stability test for membership of x_dag in the u-range set.

    Computes v_j = x_dag_j * (b_j**2)**(-u/(2(a+s))) at truncation and
    passes when the last quarter of the spectrum carries less than 1% of
    ||v||**2 (the partial norms have stabilized).  Returns (||v||, pass).
    """
    if u < 0:
        raise ValueError("need u >= 0")
    L, link, exact = problem.scale(scale_index)
    b2 = (problem.T.svals * power_factors(L, -s)) ** 2
    v = exact.x_dag.coeffs * np.exp(-u / (2.0 * (link.a + s)) * np.log(b2))
    energy = v * v
    total = float(np.sum(energy))
    tail = float(np.sum(energy[3 * problem.n // 4 :]))
    return math.sqrt(total), bool(tail < 0.01 * total)


def interpolation_check(
    L: ScaleOperator,
    trials: int = 1000,
    seed: int = 0,
    t_range: tuple[float, float] = (-3.0, 3.0),
) -> IneqReport:
    """Intermediate-norm bound for random vectors and random orders q < r < s.

    Checks ||x||_r <= ||x||_q**theta * ||x||_s**(1-theta) with
    theta = (s-r)/(s-q), in ratio form on unit vectors.
    """
    worst = math.inf
    n = len(L)
    for trial in range(trials):
        rng = _rng(seed, trial)
        x = CoeffVector(_unit_sample(rng, n))
        q, r, s = np.sort(rng.uniform(*t_range, size=3))
        if s - q < 1e-9:
            continue
        theta = (s - r) / (s - q)
        log_rhs = theta * math.log(scale_norm(L, q, x)) + (1.0 - theta) * math.log(
            scale_norm(L, s, x)
        )
        worst = min(worst, math.expm1(log_rhs - math.log(scale_norm(L, r, x))))
    return IneqReport.from_slack("interpolation", worst, trials)


def _sampling_equivalence_report(problem: Problem, trials: int, seed: int, scale_index: int) -> IneqReport:
    # Random-x two-sided check of the link with the estimated constants.
    L, link, _ = problem.scale(scale_index)
    m_est, M_est = norm_equivalence(problem, scale_index)
    worst = math.inf
    for trial in range(trials):
        x = CoeffVector(_unit_sample(_rng(seed, trial), problem.n))
        tx = float(np.linalg.norm(problem.T.svals * x.coeffs))
        ref = scale_norm(L, -link.a, x)
        worst = min(worst, tx / ref - m_est, M_est - tx / ref)
    return IneqReport.from_slack(f"norm_equivalence scale={scale_index}", worst, trials)


def standard_suite(problem: Problem, trials: int = 1000, seed: int = 0) -> list[IneqReport]:
    """The battery run by the command-line ``verify`` subcommand."""
    reports = [interpolation_check(problem.operators[0], trials=trials, seed=seed)]
    L0 = problem.operators[0]
    shift = 1.0 - min(1.0, float(np.min(L0.eigs)))
    base = L0.eigs + shift  # lift into the >= 1 sample class if needed
    reports.append(heinz_check(1.5 * base, base, nu_grid=(0.3, 1.0, 2.7),
                               trials=trials, seed=seed))
    for i in range(problem.num_scales):
        reports.append(_sampling_equivalence_report(problem, trials, seed, i))
        s_i = 0.0
        for nu in (0.5, 1.0, 1.5, 2.0):
            reports.append(
                power_range_check(problem, s=s_i, nu=nu, trials=trials, seed=seed,
                                  scale_index=i)
            )
        exact = problem.exacts[i]
        _, ok = source_condition_check(problem, s=s_i, u=exact.u, scale_index=i)
        reports.append(
            IneqReport.from_slack(
                f"source_condition u={exact.u} scale={i}", 0.0 if ok else -1.0, 1
            )
        )
    return reports
