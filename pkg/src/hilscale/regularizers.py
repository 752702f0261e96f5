"""Spectral filter families, their residuals, and certification grids.

A filter family approximates lambda -> 1/lambda.  The families here are
the standard four (Tikhonov, truncated SVD, Landweber iteration with the
iteration count m = ceil(1/alpha), and Showalter's method).  Certification
evaluates the defining conditions on dense log grids:

  C1: g_alpha(lambda) -> 1/lambda pointwise as alpha -> 0+,
  C2: |g_alpha(lambda)| <= c_hat / alpha,
  C3: lambda**mu * |r_alpha(lambda)| <= c_mu * alpha**mu,

with r_alpha(lambda) = 1 - lambda*g_alpha(lambda).  C3 can only hold up to
the qualification mu0 of the family; beyond it the certified ratio grows as
a power of 1/alpha, which the report records as a growth exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DivergenceError",
    "RegFamily",
    "tikhonov",
    "tsvd",
    "landweber",
    "showalter",
    "filter",
    "residual",
    "C3Entry",
    "CertReport",
    "certify",
]

_KINDS = ("tikhonov", "tsvd", "landweber", "showalter")

# Growth of the C3 ratio with 1/alpha above which a qualification level is
# considered failed (an exactly qualified family shows growth ~ 0).
_C3_GROWTH_LIMIT = 0.1


class DivergenceError(ValueError):
    """Landweber iteration with omega*Lambda > 1 diverges."""


@dataclass(frozen=True)
class RegFamily:
    """A filter family with its qualification and certified constants.

    ``c_hat`` is the C2 constant, ``k_const`` the constant of the composite
    bound lambda**beta * |g_alpha| <= k * alpha**(beta-1), taken as
    max(1 + c_0, c_hat) with c_0 = sup |r_alpha| = 1 for all four kinds.
    """

    kind: str
    mu0: float
    c_hat: float
    k_const: float
    omega: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown filter kind: {self.kind!r}")
        if self.kind == "landweber" and not (self.omega and self.omega > 0):
            raise ValueError("landweber requires omega > 0")

    def to_json(self) -> dict:
        doc = {"kind": self.kind}
        if self.omega is not None:
            doc["omega"] = self.omega
        return doc

    @classmethod
    def from_json(cls, doc) -> "RegFamily":
        if isinstance(doc, str):
            doc = {"kind": doc}
        kind = doc["kind"]
        if kind == "landweber":
            return landweber(doc["omega"])
        return {"tikhonov": tikhonov, "tsvd": tsvd, "showalter": showalter}[kind]()


def tikhonov() -> RegFamily:
    return RegFamily(kind="tikhonov", mu0=1.0, c_hat=1.0, k_const=2.0)


def tsvd() -> RegFamily:
    return RegFamily(kind="tsvd", mu0=math.inf, c_hat=1.0, k_const=2.0)


def landweber(omega: float) -> RegFamily:
    # c_hat = 2*omega holds for alpha <= 1 via m = ceil(1/alpha) <= 2/alpha.
    return RegFamily(
        kind="landweber",
        mu0=math.inf,
        c_hat=2.0 * omega,
        k_const=max(2.0, 2.0 * omega),
        omega=omega,
    )


def showalter() -> RegFamily:
    return RegFamily(kind="showalter", mu0=math.inf, c_hat=1.0, k_const=2.0)


def filter(family: RegFamily, alpha: float, lam):
    """Evaluate g_alpha at lam (scalar or array), with the lambda = 0 limits.

    Landweber requires omega * max(lam) <= 1; otherwise the iteration
    diverges and a DivergenceError is raised.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    lam_arr = np.asarray(lam, dtype=float)
    scalar = lam_arr.ndim == 0
    lam_arr = np.atleast_1d(lam_arr)
    if np.any(lam_arr < 0):
        raise ValueError("lambda must be nonnegative")

    if family.kind == "tikhonov":
        out = 1.0 / (lam_arr + alpha)
    elif family.kind == "tsvd":
        out = np.where(lam_arr >= alpha, 1.0 / np.where(lam_arr > 0, lam_arr, 1.0), 0.0)
    elif family.kind == "landweber":
        omega = family.omega
        if np.max(lam_arr) * omega > 1.0:
            raise DivergenceError("landweber requires omega * Lambda <= 1")
        m = math.ceil(1.0 / alpha)
        out = np.empty_like(lam_arr)
        pos = lam_arr > 0
        # 1 - (1-w*lam)**m evaluated stably through expm1/log1p; at
        # omega*lam == 1 the log is -inf and the filter value is 1/lam.
        with np.errstate(divide="ignore"):
            out[pos] = -np.expm1(m * np.log1p(-omega * lam_arr[pos])) / lam_arr[pos]
        out[~pos] = m * omega
    else:  # showalter
        out = np.empty_like(lam_arr)
        pos = lam_arr > 0
        out[pos] = -np.expm1(-lam_arr[pos] / alpha) / lam_arr[pos]
        out[~pos] = 1.0 / alpha
    return float(out[0]) if scalar else out


def residual(family: RegFamily, alpha: float, lam):
    """r_alpha(lambda) = 1 - lambda * g_alpha(lambda), exactly by definition."""
    g = filter(family, alpha, lam)
    if np.ndim(lam) == 0:
        return 1.0 - float(lam) * g
    return 1.0 - np.asarray(lam, dtype=float) * g


def _residual_closed_form(family: RegFamily, alpha: float, lam: np.ndarray) -> np.ndarray:
    # Cancellation-free residuals for the certification grids: computing
    # 1 - lam*g loses all relative accuracy where r is tiny, and the lost
    # ulps get amplified by lam**mu / alpha**mu.
    if family.kind == "tikhonov":
        return alpha / (lam + alpha)
    if family.kind == "tsvd":
        return np.where(lam >= alpha, 0.0, 1.0)
    if family.kind == "landweber":
        m = math.ceil(1.0 / alpha)
        with np.errstate(divide="ignore"):
            return np.exp(m * np.log1p(-family.omega * lam))
    return np.exp(-lam / alpha)


@dataclass(frozen=True)
class C3Entry:
    """Worst ratio sup lambda**mu |r_alpha| / alpha**mu and its alpha-growth."""

    mu: float
    c_mu: float
    growth: float
    passed: bool


@dataclass(frozen=True)
class CertReport:
    """Grid certification of C1-C3 with the recorded constants."""

    family: str
    Lambda: float
    c1_passed: bool
    c1_worst_dev: float
    c2_c_hat: float
    c2_worst: float
    c2_passed: bool
    c3: tuple[C3Entry, ...]

    @property
    def passed(self) -> bool:
        return self.c1_passed and self.c2_passed and all(e.passed for e in self.c3)

    def c3_entry(self, mu: float) -> C3Entry:
        for entry in self.c3:
            if abs(entry.mu - mu) < 1e-12:
                return entry
        raise KeyError(f"mu={mu} was not certified")

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "conditions": {
                "C1": self.c1_passed,
                "C2": {"c_hat": self.c2_c_hat, "worst": self.c2_worst},
                "C3": [{"mu": e.mu, "c_mu": e.c_mu} for e in self.c3],
            },
        }


def certify(
    family: RegFamily,
    Lambda: float,
    alphas=None,
    mus=None,
    n_lambda: int = 512,
) -> CertReport:
    """Evaluate C1-C3 for a family on log-uniform grids over (0, Lambda].

    Condition failures are reported, not raised.  For each mu the report
    records the worst ratio sup lambda**mu |r_alpha| / alpha**mu over the
    grids together with its growth exponent in 1/alpha (near zero when the
    qualification covers mu, near one for Tikhonov at mu = 2).
    """
    if Lambda <= 0:
        raise ValueError("Lambda must be positive")
    alphas = np.asarray(
        np.logspace(-6, 0, 25) if alphas is None else alphas, dtype=float
    )
    if alphas.size == 0:
        raise ValueError("alpha grid must be nonempty")
    alphas = np.sort(alphas)[::-1]
    if mus is None:
        mus = np.arange(0.0, min(family.mu0, 4.0) + 1e-9, 0.25)
    mus = np.asarray(mus, dtype=float)
    lam = np.logspace(math.log10(Lambda) - 12, math.log10(Lambda), n_lambda)

    g = np.array([filter(family, a, lam) for a in alphas])
    r = np.array([_residual_closed_form(family, a, lam) for a in alphas])

    # C2: sup alpha * |g_alpha(lambda)| against the family constant.
    c2_per_alpha = alphas * np.max(np.abs(g), axis=1)
    c2_worst = float(np.max(c2_per_alpha))
    c2_passed = c2_worst <= family.c_hat * (1.0 + 1e-9)

    # C1: |g_alpha - 1/lambda| nonincreasing as alpha decreases, per lambda.
    probe = lam[:: max(1, n_lambda // 8)]
    dev = np.abs(np.array([filter(family, a, probe) for a in alphas]) - 1.0 / probe)
    steps = np.diff(dev, axis=0)
    c1_passed = bool(np.all(steps <= 1e-9 * np.maximum(dev[:-1], 1.0 / probe)))
    c1_worst_dev = float(np.max(dev[-1] * probe))

    entries = []
    log_alpha = np.log(alphas)
    # Qualification is an alpha -> 0 statement; fit the growth on the
    # small-alpha half of the grid so edge effects near alpha ~ Lambda
    # (e.g. Landweber's ceil(1/alpha) kink) do not inflate the exponent.
    tail_sel = log_alpha <= np.median(log_alpha)
    for mu in mus:
        ratios = np.max(lam[None, :] ** mu * np.abs(r), axis=1) / alphas**mu
        c_mu = float(np.max(ratios))
        la, lr = log_alpha[tail_sel], ratios[tail_sel]
        if la.size >= 3 and np.ptp(la) > 0 and np.all(lr > 0):
            growth = float(-np.polyfit(la, np.log(lr), 1)[0])
        else:
            growth = 0.0
        entries.append(
            C3Entry(mu=float(mu), c_mu=c_mu, growth=growth, passed=growth <= _C3_GROWTH_LIMIT)
        )

    return CertReport(
        family=family.kind,
        Lambda=float(Lambda),
        c1_passed=c1_passed,
        c1_worst_dev=c1_worst_dev,
        c2_c_hat=family.c_hat,
        c2_worst=c2_worst,
        c2_passed=c2_passed,
        c3=tuple(entries),
    )
