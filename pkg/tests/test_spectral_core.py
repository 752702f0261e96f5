import numpy as np
import pytest

from hilscale import (
    CoeffVector,
    DimensionMismatchError,
    ScaleOperator,
    apply_power,
    scale_inner,
    scale_norm,
)


def vec(*values):
    return CoeffVector(np.array(values, dtype=float))


class TestConstruction:
    def test_coeffs_are_immutable(self):
        x = vec(1.0, 2.0)
        with pytest.raises(ValueError):
            x.coeffs[0] = 3.0

    def test_rejects_empty_and_nonfinite(self):
        with pytest.raises(ValueError):
            CoeffVector(np.array([]))
        with pytest.raises(ValueError):
            vec(1.0, np.nan)
        with pytest.raises(ValueError):
            vec(np.inf)

    def test_operator_rejects_nonpositive_eigs(self):
        with pytest.raises(ValueError):
            ScaleOperator(np.array([1.0, 0.0]))
        with pytest.raises(ValueError):
            ScaleOperator(np.array([1.0, -2.0]))

    def test_gamma_defaults_to_smallest_eigenvalue(self):
        op = ScaleOperator(np.array([3.0, 0.5, 2.0]))
        assert op.gamma == 0.5

    def test_gamma_must_bound_from_below(self):
        with pytest.raises(ValueError):
            ScaleOperator(np.array([1.0, 2.0]), gamma=1.5)


class TestApplyPower:
    def test_identity_power(self):
        op = ScaleOperator(np.array([1.0, 2.0]))
        out = apply_power(op, 0.0, vec(3.0, 4.0))
        np.testing.assert_array_equal(out.coeffs, [3.0, 4.0])

    def test_square_root(self):
        op = ScaleOperator(np.array([4.0]))
        out = apply_power(op, 0.5, vec(1.0))
        np.testing.assert_allclose(out.coeffs, [2.0], rtol=1e-15)

    def test_inverse_eigenvalues(self):
        op = ScaleOperator(np.array([1.0, 2.0, 3.0]))
        out = apply_power(op, -1.0, vec(1.0, 2.0, 3.0))
        np.testing.assert_allclose(out.coeffs, [1.0, 1.0, 1.0], rtol=1e-15)

    def test_roundtrip_inverse(self):
        rng = np.random.default_rng(11)
        op = ScaleOperator(rng.uniform(0.5, 50.0, size=64))
        x = CoeffVector(rng.standard_normal(64))
        back = apply_power(op, -1.7, apply_power(op, 1.7, x))
        np.testing.assert_allclose(back.coeffs, x.coeffs, rtol=1e-12)

    def test_semigroup_property(self):
        rng = np.random.default_rng(42)
        op = ScaleOperator(rng.uniform(0.2, 30.0, size=128))
        for _ in range(25):
            t1, t2 = rng.uniform(-4, 4, size=2)
            x = CoeffVector(rng.standard_normal(128))
            combined = apply_power(op, t1 + t2, x)
            chained = apply_power(op, t1, apply_power(op, t2, x))
            np.testing.assert_allclose(chained.coeffs, combined.coeffs, rtol=1e-12)

    def test_length_mismatch(self):
        op = ScaleOperator(np.array([1.0, 2.0]))
        with pytest.raises(DimensionMismatchError):
            apply_power(op, 1.0, vec(1.0))


class TestScaleNorm:
    def test_unit_eigenvalues_collapse_to_euclidean(self):
        op = ScaleOperator(np.array([1.0, 1.0]))
        assert scale_norm(op, 7.0, vec(3.0, 4.0)) == pytest.approx(5.0, abs=1e-15)

    def test_single_entry(self):
        op = ScaleOperator(np.array([2.0]))
        assert scale_norm(op, 1.0, vec(1.0)) == pytest.approx(2.0, rel=1e-15)

    def test_direct_summation_oracle(self):
        # independent oracle: explicit sum of l**(2t) * x**2
        eigs = [1.0, 2.0, 3.0]
        x = [1.0, 2.0, 3.0]
        t = -1.0
        expected = sum(l ** (2 * t) * xi**2 for l, xi in zip(eigs, x)) ** 0.5
        assert expected == pytest.approx(np.sqrt(3.0), rel=1e-15)
        op = ScaleOperator(np.array(eigs))
        assert scale_norm(op, t, vec(*x)) == pytest.approx(expected, rel=1e-13)

    def test_order_zero_is_euclidean(self):
        rng = np.random.default_rng(3)
        op = ScaleOperator(rng.uniform(0.1, 9.0, size=32))
        x = CoeffVector(rng.standard_normal(32))
        assert scale_norm(op, 0.0, x) == pytest.approx(np.linalg.norm(x.coeffs), rel=1e-15)

    def test_ordering_for_unit_lower_bound(self):
        # embeddings: higher order is stronger once all eigenvalues are >= 1
        rng = np.random.default_rng(5)
        op = ScaleOperator(rng.uniform(1.0, 40.0, size=64))
        x = CoeffVector(rng.standard_normal(64))
        orders = sorted(rng.uniform(-3, 3, size=6))
        norms = [scale_norm(op, t, x) for t in orders]
        assert all(a <= b * (1 + 1e-12) for a, b in zip(norms, norms[1:]))

    def test_interpolation_inequality(self):
        rng = np.random.default_rng(8)
        op = ScaleOperator(rng.uniform(0.3, 20.0, size=64))
        for _ in range(50):
            q, r, s = np.sort(rng.uniform(-3, 3, size=3))
            if s - q < 1e-6:
                continue
            x = CoeffVector(rng.standard_normal(64))
            theta = (s - r) / (s - q)
            lhs = scale_norm(op, r, x)
            rhs = scale_norm(op, q, x) ** theta * scale_norm(op, s, x) ** (1 - theta)
            assert lhs <= rhs * (1 + 1e-10)


class TestScaleInner:
    def test_diagonal_orthogonality(self):
        op = ScaleOperator(np.array([2.0, 5.0]))
        e1, e2 = vec(1.0, 0.0), vec(0.0, 1.0)
        assert scale_inner(op, 1.3, e1, e2) == 0.0

    def test_single_entry(self):
        op = ScaleOperator(np.array([2.0]))
        assert scale_inner(op, 1.0, vec(1.0), vec(3.0)) == pytest.approx(12.0, rel=1e-15)

    def test_inner_matches_norm_squared(self):
        rng = np.random.default_rng(17)
        op = ScaleOperator(rng.uniform(0.4, 12.0, size=48))
        for t in (-2.0, 0.0, 1.5):
            x = CoeffVector(rng.standard_normal(48))
            np.testing.assert_allclose(
                scale_inner(op, t, x, x), scale_norm(op, t, x) ** 2, rtol=1e-12
            )

    def test_length_mismatch(self):
        op = ScaleOperator(np.array([1.0, 2.0]))
        with pytest.raises(DimensionMismatchError):
            scale_inner(op, 0.0, vec(1.0, 2.0), vec(1.0))
