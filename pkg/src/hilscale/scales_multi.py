"""Weighted regularization across several Hilbert scales.

A multi-scale solution is the eta-weighted convex combination of the
single-scale solutions obtained on each generator.  The vector-valued
variant allows one filter family, one regularization parameter and one
observation per scale; per-scale terms are independent pure computations
(so they may be evaluated concurrently) and the final combination is summed
in fixed scale order for reproducibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .problems import Problem
from .regularizers import RegFamily
from .scales_single import ScaleConfig, regularize
from .spectral_core import CoeffVector

__all__ = [
    "PlanUndefinedError",
    "MultiConfig",
    "ObservationSet",
    "regularize_multi",
    "regularize_multi_vec",
    "OptimalEps",
    "optimal_eps_multi",
    "sigma_star",
    "MultiNoisePlan",
    "multi_noise_plan",
]


class PlanUndefinedError(ValueError):
    """A noise-allocation plan is undefined for the given smoothness data."""


@dataclass(frozen=True, eq=False)
class MultiConfig:
    """Scale orders, weights, families, and per-scale (a_i, u_i) metadata."""

    s_vec: tuple[float, ...]
    eta: tuple[float, ...]
    families: tuple[RegFamily, ...]
    u_vec: tuple[float, ...]
    a_vec: tuple[float, ...]

    def __post_init__(self):
        as_tuple = lambda v: tuple(float(x) for x in v)
        object.__setattr__(self, "s_vec", as_tuple(self.s_vec))
        object.__setattr__(self, "eta", as_tuple(self.eta))
        object.__setattr__(self, "u_vec", as_tuple(self.u_vec))
        object.__setattr__(self, "a_vec", as_tuple(self.a_vec))
        object.__setattr__(self, "families", tuple(self.families))
        n = len(self.s_vec)
        if not (len(self.eta) == len(self.families) == len(self.u_vec) == len(self.a_vec) == n):
            raise ValueError("all component vectors must have the same length")
        if n < 1:
            raise ValueError("need at least one scale")
        if abs(sum(self.eta) - 1.0) > 1e-12:
            raise ValueError("weights eta must sum to 1 within 1e-12")
        if any(e < 0 for e in self.eta):
            raise ValueError("weights eta must be nonnegative")
        if any(s < 0 for s in self.s_vec):
            raise ValueError("need s_i >= 0")
        if any(a <= 0 for a in self.a_vec):
            raise ValueError("need a_i > 0")

    @property
    def num_scales(self) -> int:
        return len(self.s_vec)

    def to_json(self) -> dict:
        return {
            "s": list(self.s_vec),
            "eta": list(self.eta),
            "families": [f.to_json() for f in self.families],
            "a": list(self.a_vec),
            "u": list(self.u_vec),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "MultiConfig":
        return cls(
            s_vec=doc["s"],
            eta=doc["eta"],
            families=tuple(RegFamily.from_json(f) for f in doc["families"]),
            u_vec=doc["u"],
            a_vec=doc["a"],
        )

    @classmethod
    def uniform(cls, problem: Problem, s_vec, families) -> "MultiConfig":
        """Uniform weights with (a_i, u_i) taken from the problem metadata."""
        n = problem.num_scales
        return cls(
            s_vec=s_vec,
            eta=(1.0 / n,) * n,
            families=tuple(families),
            u_vec=tuple(e.u for e in problem.exacts),
            a_vec=tuple(l.a for l in problem.links),
        )


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """N observations with their noise levels."""

    obs: tuple[CoeffVector, ...]
    deltas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "obs", tuple(self.obs))
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))
        if len(self.obs) != len(self.deltas):
            raise ValueError("need one delta per observation")
        if any(d <= 0 for d in self.deltas):
            raise ValueError("noise levels must be positive")

    @classmethod
    def from_observations(cls, y: CoeffVector, obs, deltas) -> "ObservationSet":
        """Build after verifying ||obs_i - y|| <= delta_i for the exact data y."""
        out = cls(obs=tuple(obs), deltas=tuple(deltas))
        for i, (o, d) in enumerate(zip(out.obs, out.deltas)):
            if (o - y).norm() > d * (1.0 + 1e-12):
                raise ValueError(f"observation {i} exceeds its stated noise level")
        return out

    @classmethod
    def replicate(cls, y_obs: CoeffVector, delta: float, n: int) -> "ObservationSet":
        return cls(obs=(y_obs,) * n, deltas=(delta,) * n)


def _check_scales(problem: Problem, cfg: MultiConfig):
    if cfg.num_scales != problem.num_scales:
        raise ValueError(
            f"config has {cfg.num_scales} scales but problem has {problem.num_scales}"
        )


def regularize_multi(
    problem: Problem, cfg: MultiConfig, alpha: float, y_obs: CoeffVector
) -> CoeffVector:
    """Convex combination of per-scale solutions from a single observation.

    The observation is replicated across all scales and every term uses the
    same regularization parameter.
    """
    obs = ObservationSet.replicate(y_obs, delta=1.0, n=cfg.num_scales)
    return regularize_multi_vec(problem, cfg, (alpha,) * cfg.num_scales, obs)


def regularize_multi_vec(
    problem: Problem, cfg: MultiConfig, alpha_vec, obs: ObservationSet
) -> CoeffVector:
    """Per-scale filtered inversions combined with the weights eta.

    Terms are summed in scale order; with equal families, equal parameters
    and equal observations this reduces exactly to regularize_multi.
    """
    _check_scales(problem, cfg)
    alphas = tuple(float(a) for a in alpha_vec)
    if len(alphas) != cfg.num_scales or len(obs.obs) != cfg.num_scales:
        raise ValueError("need one alpha and one observation per scale")
    terms = [
        regularize(problem, ScaleConfig(s=cfg.s_vec[i], family=cfg.families[i]),
                   alphas[i], obs.obs[i], scale=i)
        for i in range(cfg.num_scales)
    ]
    acc = np.zeros(problem.n)
    for eta_i, term in zip(cfg.eta, terms):
        acc = acc + eta_i * term.coeffs
    return CoeffVector(acc)


class OptimalEps(NamedTuple):
    epsilon: float
    sigma_c: float


def optimal_eps_multi(cfg: MultiConfig) -> OptimalEps:
    """Optimal scalar exponent for a single observation, and its order.

    epsilon = (max_i a_i/(2(a_i+s_i)) + min_i u_i/(2(a_i+s_i)))**(-1) and
    sigma_c = the min term divided by the sum of the two terms.
    """
    noise_terms = [a / (2.0 * (a + s)) for a, s in zip(cfg.a_vec, cfg.s_vec)]
    smooth_terms = [u / (2.0 * (a + s)) for u, a, s in zip(cfg.u_vec, cfg.a_vec, cfg.s_vec)]
    hi = max(noise_terms)
    lo = min(smooth_terms)
    return OptimalEps(epsilon=1.0 / (hi + lo), sigma_c=lo / (hi + lo))


def sigma_star(cfg: MultiConfig) -> float:
    """Optimal order with per-scale parameters: min_i u_i/(a_i+u_i)."""
    return min(u / (a + u) for u, a in zip(cfg.u_vec, cfg.a_vec))


@dataclass(frozen=True)
class MultiNoisePlan:
    """Noise-budget exponents and per-scale parameters for a base level delta."""

    p: tuple[float, ...]
    deltas: tuple[float, ...]
    alphas: tuple[float, ...]
    sigma_hat: float


def multi_noise_plan(cfg: MultiConfig, delta: float, c: float = 1.0) -> MultiNoisePlan:
    """Cheapest per-scale noise allocation achieving the best single rate.

    p_i is the ratio of the best single-scale rate max_k u_k/(a_k+u_k) to
    scale i's own rate (so p_i >= 1), delta_i = delta**p_i, and
    alpha_i = c * delta_i**(2(a_i+s_i)/(a_i+u_i)).  Returns the achieved
    order sigma_hat = max_i u_i/(a_i+u_i).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if any(u <= 0 for u in cfg.u_vec):
        raise PlanUndefinedError("every u_i must be positive to budget noise levels")
    rates = [u / (a + u) for u, a in zip(cfg.u_vec, cfg.a_vec)]
    best = max(rates)
    p = tuple(best / rate for rate in rates)
    deltas = tuple(delta**p_i for p_i in p)
    alphas = tuple(
        c * d ** (2.0 * (a + s) / (a + u))
        for d, a, s, u in zip(deltas, cfg.a_vec, cfg.s_vec, cfg.u_vec)
    )
    return MultiNoisePlan(p=p, deltas=deltas, alphas=alphas, sigma_hat=best)
