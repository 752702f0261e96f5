"""Diagonal spectral engine: fractional powers and Hilbert-scale norms.

Every operator in this package is diagonal in one fixed orthonormal basis,
so functional calculus reduces to elementwise maps on eigenvalue sequences.
Powers are computed as exp(t*ln(l)) in double precision, with no special
casing beyond t = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DimensionMismatchError",
    "CoeffVector",
    "ScaleOperator",
    "apply_power",
    "power_factors",
    "scale_norm",
    "scale_inner",
]


class DimensionMismatchError(ValueError):
    """Operands live in bases of different lengths."""


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class CoeffVector:
    """A finite coefficient sequence in the shared orthonormal basis.

    Immutable after construction; all entries must be finite and the
    length must be at least 1.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _readonly(self.coeffs))
        if self.coeffs.ndim != 1 or self.coeffs.size < 1:
            raise ValueError("coeffs must be a one-dimensional sequence of length >= 1")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coeffs must be finite")

    def __len__(self) -> int:
        return self.coeffs.size

    def __add__(self, other: "CoeffVector") -> "CoeffVector":
        _check_lengths(self, other)
        return CoeffVector(self.coeffs + other.coeffs)

    def __sub__(self, other: "CoeffVector") -> "CoeffVector":
        _check_lengths(self, other)
        return CoeffVector(self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "CoeffVector":
        return CoeffVector(self.coeffs * float(scalar))

    __rmul__ = __mul__

    def norm(self) -> float:
        """Euclidean norm of the coefficients (the norm of X at order 0)."""
        return float(np.linalg.norm(self.coeffs))


@dataclass(frozen=True, eq=False)
class ScaleOperator:
    """Eigenvalues of a strictly positive generator in the shared basis.

    ``gamma`` is the certified lower bound: every eigenvalue must satisfy
    l_j >= gamma > 0.  When omitted it defaults to min(eigs).
    """

    eigs: np.ndarray
    gamma: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "eigs", _readonly(self.eigs))
        if self.eigs.ndim != 1 or self.eigs.size < 1:
            raise ValueError("eigs must be a one-dimensional sequence of length >= 1")
        if not np.all(np.isfinite(self.eigs)) or not np.all(self.eigs > 0):
            raise ValueError("eigs must be finite and strictly positive")
        gamma = float(np.min(self.eigs)) if self.gamma is None else float(self.gamma)
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        if np.any(self.eigs < gamma):
            raise ValueError("every eigenvalue must be >= gamma")
        object.__setattr__(self, "gamma", gamma)

    def __len__(self) -> int:
        return self.eigs.size


def _check_lengths(*items) -> int:
    sizes = {len(item) for item in items}
    if len(sizes) != 1:
        raise DimensionMismatchError(f"length mismatch: {sorted(sizes)}")
    return sizes.pop()


def power_factors(op: ScaleOperator, t: float) -> np.ndarray:
    """Eigenvalues of the fractional power: the sequence l_j**t.

    Computed as exp(t*ln(l_j)); t = 0 returns exact ones.
    """
    if t == 0.0:
        return np.ones_like(op.eigs)
    return np.exp(float(t) * np.log(op.eigs))


def apply_power(op: ScaleOperator, t: float, x: CoeffVector) -> CoeffVector:
    """Apply the fractional power of the generator: output_j = l_j**t * x_j."""
    _check_lengths(op, x)
    if t == 0.0:
        return CoeffVector(x.coeffs)
    return CoeffVector(power_factors(op, t) * x.coeffs)


def scale_norm(op: ScaleOperator, t: float, x: CoeffVector) -> float:
    """Norm of order t: sqrt(sum_j l_j**(2t) * x_j**2).

    Order 0 is the plain Euclidean norm of the coefficients.
    """
    _check_lengths(op, x)
    return float(np.linalg.norm(power_factors(op, t) * x.coeffs))


def scale_inner(op: ScaleOperator, t: float, x: CoeffVector, y: CoeffVector) -> float:
    """Inner product of order t: sum_j l_j**(2t) * x_j * y_j.

    Evaluated as the Euclidean inner product of the two power-weighted
    vectors, so scale_inner(op, t, x, x) == scale_norm(op, t, x)**2 up to
    roundoff.
    """
    _check_lengths(op, x, y)
    f = power_factors(op, t)
    return float(np.dot(f * x.coeffs, f * y.coeffs))
