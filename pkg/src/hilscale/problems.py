"""Test problems with exactly known smoothing link and solution smoothness.

Two single-scale families (a pure power-law diagonal and the classical
integration operator) and one multi-scale family.  All of them satisfy the
smoothing link sigma_j * l_j**a = 1 exactly by construction, so the link
constants are m = M = 1 and rate experiments are free of constant effects.

Solution smoothness is certified at truncation by a 1% tail criterion
rather than asserted symbolically: a problem is only accepted when the top
half of the spectrum carries less than 1% of the weighted energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spectral_core import (
    CoeffVector,
    DimensionMismatchError,
    ScaleOperator,
    _check_lengths,
    power_factors,
    scale_norm,
)

__all__ = [
    "TruncationError",
    "ForwardOperator",
    "SmoothingLink",
    "ExactSolution",
    "Problem",
    "synthetic_diagonal",
    "integration_problem",
    "multi_scale_problem",
    "moore_penrose",
    "problem_to_json",
    "problem_from_json",
]

TAIL_LIMIT = 0.01
U_GRID = np.arange(0.0, 4.0 + 1e-9, 0.25)


class TruncationError(ValueError):
    """The truncation level is too small for the requested smoothness."""

    def __init__(self, message: str, min_n: int):
        super().__init__(message)
        self.min_n = min_n


@dataclass(frozen=True, eq=False)
class ForwardOperator:
    """Singular values of the forward map in the shared basis (all > 0)."""

    svals: np.ndarray

    def __post_init__(self):
        arr = np.array(self.svals, dtype=float)
        arr.flags.writeable = False
        object.__setattr__(self, "svals", arr)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("svals must be a one-dimensional sequence of length >= 1")
        if not np.all(np.isfinite(arr)) or not np.all(arr > 0):
            raise ValueError("svals must be finite and strictly positive (injective map)")

    def __len__(self) -> int:
        return self.svals.size

    def apply(self, x: CoeffVector) -> CoeffVector:
        _check_lengths(self, x)
        return CoeffVector(self.svals * x.coeffs)


@dataclass(frozen=True)
class SmoothingLink:
    """Constants (a, m, M) linking the forward map to one scale generator.

    The elementwise form of the link is m * l_j**(-a) <= sigma_j <=
    M * l_j**(-a) for every j.
    """

    a: float
    m: float
    M: float

    def __post_init__(self):
        if not (self.a > 0 and 0 < self.m <= self.M):
            raise ValueError("need a > 0 and 0 < m <= M")

    def holds_for(self, T: ForwardOperator, L: ScaleOperator, rtol: float = 1e-10) -> bool:
        """Elementwise check of the link inequalities with relative slack."""
        ref = power_factors(L, -self.a)
        lo = self.m * ref * (1.0 - rtol)
        hi = self.M * ref * (1.0 + rtol)
        return bool(np.all(T.svals >= lo) and np.all(T.svals <= hi))


@dataclass(frozen=True, eq=False)
class ExactSolution:
    """An exact solution together with its certified smoothness metadata.

    ``u_norm`` is the scale norm of order u at truncation and
    ``tail_fraction`` is the share of that squared norm carried by the
    indices j > n/2.  The constructor classmethod enforces the 1% tail
    criterion used throughout the package.
    """

    x_dag: CoeffVector
    u: float
    u_norm: float
    tail_fraction: float

    @classmethod
    def certify(cls, L: ScaleOperator, x_dag: CoeffVector, u: float) -> "ExactSolution":
        u_norm = scale_norm(L, u, x_dag)
        frac = tail_fraction(L, x_dag, u)
        return cls(x_dag=x_dag, u=float(u), u_norm=u_norm, tail_fraction=frac)


def tail_fraction(L: ScaleOperator, x: CoeffVector, u: float) -> float:
    """Share of the squared u-norm carried by the top half of the spectrum."""
    _check_lengths(L, x)
    terms = (power_factors(L, u) * x.coeffs) ** 2
    total = float(np.sum(terms))
    if total == 0.0:
        return 0.0
    half = len(x) // 2
    return float(np.sum(terms[half:]) / total)


@dataclass(frozen=True, eq=False)
class Problem:
    """An operator equation T x = y with per-scale link and smoothness data.

    ``L``, ``link`` and ``exact`` are single values for single-scale
    problems and tuples (one entry per scale) for multi-scale ones; the
    exact solution coefficients are shared across scales.
    """

    L: ScaleOperator | tuple[ScaleOperator, ...]
    T: ForwardOperator
    link: SmoothingLink | tuple[SmoothingLink, ...]
    exact: ExactSolution | tuple[ExactSolution, ...]
    y: CoeffVector
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for L_i, link_i, exact_i in zip(self.operators, self.links, self.exacts):
            _check_lengths(L_i, self.T, exact_i.x_dag, self.y)
            if not link_i.holds_for(self.T, L_i):
                raise ValueError("smoothing link violated for one of the scales")
        if not np.array_equal(self.y.coeffs, self.T.svals * self.x_dag.coeffs):
            raise ValueError("y must equal T x_dag exactly")

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def num_scales(self) -> int:
        return len(self.operators)

    @property
    def operators(self) -> tuple[ScaleOperator, ...]:
        return self.L if isinstance(self.L, tuple) else (self.L,)

    @property
    def links(self) -> tuple[SmoothingLink, ...]:
        return self.link if isinstance(self.link, tuple) else (self.link,)

    @property
    def exacts(self) -> tuple[ExactSolution, ...]:
        return self.exact if isinstance(self.exact, tuple) else (self.exact,)

    @property
    def x_dag(self) -> CoeffVector:
        return self.exacts[0].x_dag

    def scale(self, i: int = 0) -> tuple[ScaleOperator, SmoothingLink, ExactSolution]:
        return self.operators[i], self.links[i], self.exacts[i]

    def tail_energy(self, r: float = 0.0) -> float:
        """Integral estimate of the r-norm energy of x_dag beyond truncation.

        Problems are built from power-law rules x_j = l_j**(-p) with
        l_j ~ c*j, so the discarded energy is estimated by the tail
        integral of (c*t)**(2r - 2p).
        """
        rule = self.meta.get("x_dag_rule")
        if rule is None:
            return 0.0
        p = rule["u"] + 0.5 + rule["tau"]
        c = self.meta.get("eig_slope", 1.0)
        expo = 2.0 * (r - p)
        if expo >= -1.0:
            return math.inf
        n = self.n
        return math.sqrt(c**expo * n ** (expo + 1.0) / -(expo + 1.0))


def _min_n_estimate(tau: float, series_sum: float) -> int:
    # Tail integral of j**(-1-2*tau) over (n/2, n] equated to 1% of the sum.
    target = TAIL_LIMIT * series_sum * 2.0 * tau / (2.0 ** (2.0 * tau) - 1.0)
    return int(math.ceil(target ** (-1.0 / (2.0 * tau))))


def _certified_or_raise(L: ScaleOperator, x: CoeffVector, u: float, tau: float) -> ExactSolution:
    exact = ExactSolution.certify(L, x, u)
    if exact.tail_fraction >= TAIL_LIMIT:
        terms = (power_factors(L, u) * x.coeffs) ** 2
        min_n = _min_n_estimate(tau, float(np.sum(terms)) / terms[0])
        raise TruncationError(
            f"truncation too small: tail fraction {exact.tail_fraction:.4f} >= "
            f"{TAIL_LIMIT}; an estimated n >= {min_n} would pass",
            min_n=min_n,
        )
    return exact


def _power_law_problem(
    eigs: np.ndarray, a: float, u: float, tau: float, meta: dict
) -> Problem:
    L = ScaleOperator(eigs)
    svals = np.exp(-a * np.log(eigs))
    T = ForwardOperator(svals)
    x = CoeffVector(np.exp(-(u + 0.5 + tau) * np.log(eigs)))
    exact = _certified_or_raise(L, x, u, tau)
    y = CoeffVector(svals * x.coeffs)
    link = SmoothingLink(a=a, m=1.0, M=1.0)
    meta = dict(meta)
    meta["per_scale"] = [{"a": a, "m": 1.0, "M": 1.0, "u_i": float(u)}]
    return Problem(L=L, T=T, link=link, exact=exact, y=y, meta=meta)


def synthetic_diagonal(n: int, a: float, u: float, tau: float = 0.5) -> Problem:
    """Pure power-law problem: l_j = j, sigma_j = j**(-a), x_j = j**(-u-1/2-tau).

    The link holds with m = M = 1 exactly and y = T x elementwise.  Raises
    TruncationError (naming the estimated minimal n) when the 1% tail
    criterion fails at this truncation.
    """
    if n < 16:
        raise ValueError("need n >= 16")
    if tau <= 0:
        raise ValueError("need tau > 0")
    j = np.arange(1, n + 1, dtype=float)
    meta = {
        "n": n,
        "generator": {"kind": "synthetic_diagonal", "params": {"a": float(a), "u": float(u), "tau": float(tau)}},
        "svals_rule": "l^-a",
        "x_dag_rule": {"u": float(u), "tau": float(tau)},
        "eig_slope": 1.0,
    }
    return _power_law_problem(j, a, u, tau, meta)


def integration_problem(n: int, u: float, tau: float = 0.5) -> Problem:
    """Integration-operator spectrum: sigma_j = 1/((j-1/2)*pi), l_j = (j-1/2)*pi.

    A classical a = 1 instance; sigma_j * l_j = 1 exactly.
    """
    if n < 16:
        raise ValueError("need n >= 16")
    if tau <= 0:
        raise ValueError("need tau > 0")
    j = np.arange(1, n + 1, dtype=float)
    eigs = (j - 0.5) * math.pi
    meta = {
        "n": n,
        "generator": {"kind": "integration", "params": {"u": float(u), "tau": float(tau)}},
        "svals_rule": "1/((j-1/2)*pi)",
        "x_dag_rule": {"u": float(u), "tau": float(tau)},
        "eig_slope": math.pi,
    }
    return _power_law_problem(eigs, 1.0, u, tau, meta)


def multi_scale_problem(
    n: int,
    a_list,
    s_unused=None,
    u_target: float = 1.0,
    tau: float = 0.5,
) -> Problem:
    """One forward map, N scale generators with exact links of degrees a_i.

    sigma_j = 1/j and l_{i,j} = j**(1/a_i), so sigma_j = l_{i,j}**(-a_i)
    exactly (m_i = M_i = 1).  The shared exact solution is built against the
    reference scale l_j = j; each scale records the largest smoothness on
    the grid {0, 0.25, ..., 4} whose tail fraction stays below 1%.

    ``s_unused`` is accepted for signature compatibility and ignored.
    """
    del s_unused
    a_vec = tuple(float(a) for a in a_list)
    if len(a_vec) < 2:
        raise ValueError("need at least two scales (N >= 2)")
    if any(a <= 0 for a in a_vec):
        raise ValueError("all a_i must be positive")
    if n < 16:
        raise ValueError("need n >= 16")
    if tau <= 0:
        raise ValueError("need tau > 0")
    j = np.arange(1, n + 1, dtype=float)
    svals = 1.0 / j
    T = ForwardOperator(svals)
    x = CoeffVector(np.exp(-(u_target + 0.5 + tau) * np.log(j)))
    y = CoeffVector(svals * x.coeffs)

    operators, links, exacts, per_scale = [], [], [], []
    for i, a_i in enumerate(a_vec):
        L_i = ScaleOperator(np.exp(np.log(j) / a_i))
        passing = [u for u in U_GRID if tail_fraction(L_i, x, u) < TAIL_LIMIT]
        if not passing:
            raise ValueError(f"exact solution too rough for scale {i}")
        u_i = float(max(passing))
        operators.append(L_i)
        links.append(SmoothingLink(a=a_i, m=1.0, M=1.0))
        exacts.append(ExactSolution.certify(L_i, x, u_i))
        per_scale.append({"a": a_i, "m": 1.0, "M": 1.0, "u_i": u_i})

    meta = {
        "n": n,
        "generator": {
            "kind": "multi_scale",
            "params": {"a_list": list(a_vec), "u_target": float(u_target), "tau": float(tau)},
        },
        "svals_rule": "j^-1",
        "x_dag_rule": {"u": float(u_target), "tau": float(tau)},
        "eig_slope": 1.0,
        "per_scale": per_scale,
    }
    return Problem(
        L=tuple(operators), T=T, link=tuple(links), exact=tuple(exacts), y=y, meta=meta
    )


def moore_penrose(T: ForwardOperator, y: CoeffVector) -> CoeffVector:
    """Unregularized generalized inverse: coefficientwise y_j / sigma_j."""
    _check_lengths(T, y)
    return CoeffVector(y.coeffs / T.svals)


def problem_to_json(problem: Problem) -> dict:
    """Serializable description: {n, generator, svals_rule, x_dag_rule, per_scale}."""
    meta = problem.meta
    return {
        "n": meta["n"],
        "generator": meta["generator"],
        "svals_rule": meta["svals_rule"],
        "x_dag_rule": meta["x_dag_rule"],
        "per_scale": meta["per_scale"],
    }


def problem_from_json(doc: dict) -> Problem:
    """Rebuild a problem from its JSON description."""
    kind = doc["generator"]["kind"]
    params = doc["generator"]["params"]
    n = int(doc["n"])
    if kind == "synthetic_diagonal":
        return synthetic_diagonal(n, a=params["a"], u=params["u"], tau=params["tau"])
    if kind == "integration":
        return integration_problem(n, u=params["u"], tau=params["tau"])
    if kind == "multi_scale":
        return multi_scale_problem(
            n, params["a_list"], u_target=params["u_target"], tau=params["tau"]
        )
    raise ValueError(f"unknown generator kind: {kind!r}")
