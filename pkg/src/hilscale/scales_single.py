"""Single-scale regularized solutions, parameter rules, and error norms.

The regularized solution is x = L**(-s) g_alpha(B*B) B* y with B = T L**(-s);
in the shared diagonal basis this is the coefficientwise map

    x_j = l_j**(-s) * g_alpha(b_j**2) * b_j * y_j,   b_j = sigma_j * l_j**(-s).

The a-priori parameter rules implemented here need the smoothness u and the
u-norm of the exact solution; the library takes those from the problem
metadata, which makes the smoothness-aware rule an oracle rule intended for
rate verification, not for blind inversion.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .problems import Problem
from .regularizers import RegFamily, filter as filter_value
from .spectral_core import CoeffVector, _check_lengths, power_factors, scale_norm

__all__ = [
    "InvalidRuleError",
    "ScaleConfig",
    "ParamRule",
    "b_squared",
    "regularize",
    "alpha_from_rule",
    "optimal_epsilon",
    "error_r_norm",
    "theoretical_order",
]


class InvalidRuleError(ValueError):
    """Parameter rule outside its admissible range."""


@dataclass(frozen=True)
class ScaleConfig:
    """Order s >= 0 of the penalizing power and the filter family used."""

    s: float
    family: RegFamily

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("need s >= 0")


@dataclass(frozen=True)
class ParamRule:
    """A-priori choice of alpha from the noise level delta.

    ``natterer``: alpha = c * (delta / ||x||_u) ** (2(a+s)/(a+u)).
    ``power``:    alpha = c * delta ** epsilon with epsilon inside the open
    interval (0, 2(a+s)/a), checked where a and s are known.
    """

    kind: str
    c: float = 1.0
    epsilon: float | None = None

    def __post_init__(self):
        if self.kind not in ("natterer", "power"):
            raise ValueError(f"unknown rule kind: {self.kind!r}")
        if self.c <= 0:
            raise ValueError("need c > 0")
        if self.kind == "power" and (self.epsilon is None or self.epsilon <= 0):
            raise ValueError("power rule requires epsilon > 0")

    def to_json(self) -> dict:
        doc = {"kind": self.kind, "c": self.c}
        if self.epsilon is not None:
            doc["epsilon"] = self.epsilon
        return doc


def b_squared(problem: Problem, s: float, scale: int = 0) -> CoeffVector:
    """Eigenvalues of B*B in the shared basis: entry j = (sigma_j * l_j**(-s))**2."""
    if s < 0:
        raise ValueError("need s >= 0")
    L, _, _ = problem.scale(scale)
    b = problem.T.svals * power_factors(L, -s)
    return CoeffVector(b * b)


def regularize(
    problem: Problem,
    cfg: ScaleConfig,
    alpha: float,
    y_obs: CoeffVector,
    scale: int = 0,
) -> CoeffVector:
    """Filtered inversion of the observation in the scale of order cfg.s."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    L, _, _ = problem.scale(scale)
    _check_lengths(problem.T, y_obs)
    ls = power_factors(L, -cfg.s)
    b = problem.T.svals * ls
    g = filter_value(cfg.family, alpha, b * b)
    return CoeffVector(ls * g * b * y_obs.coeffs)


def alpha_from_rule(
    rule: ParamRule,
    delta: float,
    a: float,
    s: float,
    u: float | None = None,
    u_norm: float | None = None,
) -> float:
    """Evaluate a parameter rule at noise level delta."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if rule.kind == "natterer":
        if u is None or u_norm is None or u_norm <= 0:
            raise InvalidRuleError("the smoothness-aware rule needs u and u_norm")
        return rule.c * (delta / u_norm) ** (2.0 * (a + s) / (a + u))
    limit = 2.0 * (a + s) / a
    if not 0.0 < rule.epsilon < limit:
        raise InvalidRuleError(
            f"power rule needs epsilon in the open interval (0, {limit}); "
            f"got {rule.epsilon}"
        )
    return rule.c * delta**rule.epsilon


def optimal_epsilon(a: float, s: float, u: float) -> float:
    """Rate-optimal exponent 2(a+s)/(a+u) for the power rule.

    At u = 0 this returns the open-interval endpoint 2(a+s)/a, which the
    power rule itself rejects.
    """
    if a <= 0:
        raise ValueError("need a > 0")
    return 2.0 * (a + s) / (a + u)


def error_r_norm(problem: Problem, r: float, x: CoeffVector, scale: int = 0) -> float:
    """Scale norm of order r of the deviation from the exact solution.

    Values of r outside [-a, u] fall outside the range covered by the error
    estimates; the norm is still computable, so this only warns.
    """
    L, link, exact = problem.scale(scale)
    if r < -link.a or r > exact.u:
        warnings.warn(
            f"r={r} outside [-a, u] = [{-link.a}, {exact.u}]; the error "
            "estimate interval does not cover this norm",
            stacklevel=2,
        )
    return scale_norm(L, r, x - exact.x_dag)


def theoretical_order(
    a: float,
    s: float,
    u: float,
    r: float = 0.0,
    epsilon: float | None = None,
) -> float:
    """Total-error exponent in delta for the r-norm.

    With a power rule of exponent epsilon the order is
    min(1 - epsilon*(a+r)/(2(a+s)), epsilon*(u-r)/(2(a+s))); r = 0 recovers
    the plain-norm formula.  Without epsilon (the optimal rule) the order is
    (u-r)/(a+u).
    """
    if epsilon is None:
        return (u - r) / (a + u)
    two_as = 2.0 * (a + s)
    return min(1.0 - epsilon * (a + r) / two_as, epsilon * (u - r) / two_as)
