import math

import numpy as np
import pytest

from hilscale import (
    CoeffVector,
    ExactSolution,
    ForwardOperator,
    Problem,
    ScaleOperator,
    SmoothingLink,
    TruncationError,
    integration_problem,
    moore_penrose,
    multi_scale_problem,
    problem_from_json,
    problem_to_json,
    synthetic_diagonal,
)
from hilscale.problems import tail_fraction


class TestSyntheticDiagonal:
    def test_elementwise_construction(self):
        # u + 1/2 + tau = 1, so x_j = 1/j and y_j = 1/j**2 on the leading block
        p = synthetic_diagonal(100, a=1.0, u=0.0, tau=0.5)
        j = np.arange(1, 5, dtype=float)
        np.testing.assert_allclose(p.T.svals[:4], [1, 1 / 2, 1 / 3, 1 / 4], rtol=1e-14)
        np.testing.assert_allclose(p.x_dag.coeffs[:4], 1 / j, rtol=1e-14)
        np.testing.assert_allclose(p.y.coeffs[:4], 1 / j**2, rtol=1e-14)

    def test_minimum_size_precondition(self):
        with pytest.raises(ValueError):
            synthetic_diagonal(4, a=1.0, u=0.0, tau=0.5)

    def test_link_exact_by_construction(self):
        p = synthetic_diagonal(500, a=1.7, u=1.0, tau=0.5)
        l_a = np.exp(p.links[0].a * np.log(p.operators[0].eigs))
        np.testing.assert_allclose(p.T.svals * l_a, 1.0, rtol=1e-12)
        assert p.links[0].m == p.links[0].M == 1.0

    def test_y_equals_T_x_exactly(self):
        p = synthetic_diagonal(64, a=1.0, u=1.0, tau=0.5)
        np.testing.assert_array_equal(p.y.coeffs, p.T.svals * p.x_dag.coeffs)

    def test_tail_fraction_against_direct_summation(self):
        p = synthetic_diagonal(2000, a=1.0, u=1.0, tau=0.5)
        exact = p.exacts[0]
        # independent oracle: explicit loop over the weighted series
        j = np.arange(1, 2001, dtype=float)
        terms = j ** (2 * exact.u) * p.x_dag.coeffs**2
        oracle = terms[1000:].sum() / terms.sum()
        assert exact.tail_fraction == pytest.approx(oracle, rel=1e-12)
        assert exact.tail_fraction < 0.01

    def test_u_norm_matches_scale_norm(self):
        p = synthetic_diagonal(300, a=1.0, u=2.0, tau=0.5)
        j = np.arange(1, 301, dtype=float)
        oracle = math.sqrt(np.sum(j**4 * p.x_dag.coeffs**2))
        assert p.exacts[0].u_norm == pytest.approx(oracle, rel=1e-13)

    def test_truncation_rejection_names_usable_n(self):
        # u = 0, tau = 0.5 needs n of a few dozen; n = 16 is too small
        with pytest.raises(TruncationError) as info:
            synthetic_diagonal(16, a=1.0, u=0.0, tau=0.5)
        min_n = info.value.min_n
        assert min_n > 16
        rebuilt = synthetic_diagonal(max(min_n, 16), a=1.0, u=0.0, tau=0.5)
        assert rebuilt.exacts[0].tail_fraction < 0.01


class TestIntegrationProblem:
    def test_first_singular_pair(self):
        p = integration_problem(64, u=1.0, tau=0.5)
        assert p.T.svals[0] == pytest.approx(2.0 / math.pi, rel=1e-15)
        assert p.operators[0].eigs[0] == pytest.approx(math.pi / 2.0, rel=1e-15)
        assert p.T.svals[0] * p.operators[0].eigs[0] == pytest.approx(1.0, rel=1e-14)

    def test_link_holds_elementwise(self):
        p = integration_problem(128, u=1.0, tau=0.5)
        assert p.links[0].a == 1.0
        assert p.links[0].holds_for(p.T, p.operators[0])

    def test_tail_fraction_at_desk_scale(self):
        p = integration_problem(1000, u=2.0, tau=0.5)
        eigs = p.operators[0].eigs
        terms = eigs**4 * p.x_dag.coeffs**2
        oracle = terms[500:].sum() / terms.sum()
        assert p.exacts[0].tail_fraction == pytest.approx(oracle, rel=1e-12)
        assert oracle < 0.01


class TestMultiScaleProblem:
    def test_exact_links_for_each_scale(self):
        p = multi_scale_problem(256, (1.0, 2.0), u_target=1.0, tau=0.5)
        j = np.arange(1, 257, dtype=float)
        np.testing.assert_allclose(p.operators[1].eigs, np.sqrt(j), rtol=1e-14)
        np.testing.assert_allclose(
            p.T.svals * p.operators[1].eigs ** 2, 1.0, rtol=1e-12
        )
        assert [lk.a for lk in p.links] == [1.0, 2.0]

    def test_certified_smoothness_respects_convergence(self):
        # x_j = j**-2 under l = j: the weighted series needs 2u - 4 < -1
        p = multi_scale_problem(2000, (1.0, 2.0), u_target=1.0, tau=0.5)
        assert p.exacts[0].u <= 1.5
        for i, exact in enumerate(p.exacts):
            assert tail_fraction(p.operators[i], p.x_dag, exact.u) < 0.01

    def test_single_scale_rejected(self):
        with pytest.raises(ValueError):
            multi_scale_problem(64, (1.0,), u_target=1.0, tau=0.5)

    def test_shared_solution_across_scales(self):
        p = multi_scale_problem(128, (1.0, 2.0), u_target=1.0, tau=0.5)
        assert p.exacts[0].x_dag is p.exacts[1].x_dag


class TestMoorePenrose:
    def test_exact_data_inversion(self):
        p = synthetic_diagonal(64, a=1.0, u=1.0, tau=0.5)
        out = moore_penrose(p.T, p.y)
        np.testing.assert_allclose(out.coeffs, p.x_dag.coeffs, rtol=1e-14)

    def test_scalar_case(self):
        out = moore_penrose(ForwardOperator(np.array([2.0])), CoeffVector(np.array([1.0])))
        assert out.coeffs[0] == 0.5

    def test_reconstruction_of_random_vectors(self):
        rng = np.random.default_rng(23)
        p = synthetic_diagonal(200, a=1.0, u=1.0, tau=0.5)
        for _ in range(10):
            x = CoeffVector(rng.standard_normal(200))
            back = moore_penrose(p.T, p.T.apply(x))
            np.testing.assert_allclose(back.coeffs, x.coeffs, rtol=1e-14)

    def test_single_coefficient_amplification(self):
        # noise of size delta in coefficient n blows up by exactly 1/sigma_n
        p = synthetic_diagonal(100, a=1.0, u=1.0, tau=0.5)
        delta = 1e-3
        noisy = p.y.coeffs.copy()
        noisy[-1] += delta
        err = moore_penrose(p.T, CoeffVector(noisy)) - p.x_dag
        assert err.norm() == pytest.approx(delta / p.T.svals[-1], rel=1e-12)

    def test_amplification_grows_with_frequency(self):
        p = synthetic_diagonal(64, a=1.0, u=1.0, tau=0.5)
        delta = 1e-4
        errors = []
        for j in (0, 15, 40, 63):
            noisy = p.y.coeffs.copy()
            noisy[j] += delta
            err = moore_penrose(p.T, CoeffVector(noisy)) - p.x_dag
            errors.append(err.norm())
        assert all(a <= b for a, b in zip(errors, errors[1:]))


class TestSerialization:
    def test_schema_field_names(self):
        doc = problem_to_json(synthetic_diagonal(64, a=1.0, u=1.0, tau=0.5))
        assert set(doc) == {"n", "generator", "svals_rule", "x_dag_rule", "per_scale"}
        assert set(doc["generator"]) == {"kind", "params"}
        assert set(doc["x_dag_rule"]) == {"u", "tau"}
        assert set(doc["per_scale"][0]) == {"a", "m", "M", "u_i"}

    @pytest.mark.parametrize(
        "build",
        [
            lambda: synthetic_diagonal(64, a=1.5, u=1.0, tau=0.5),
            lambda: integration_problem(64, u=1.0, tau=0.5),
            lambda: multi_scale_problem(64, (1.0, 2.0), u_target=1.0, tau=0.5),
        ],
    )
    def test_roundtrip(self, build):
        p = build()
        q = problem_from_json(problem_to_json(p))
        assert q.num_scales == p.num_scales
        np.testing.assert_array_equal(q.T.svals, p.T.svals)
        np.testing.assert_array_equal(q.x_dag.coeffs, p.x_dag.coeffs)
        for a, b in zip(q.operators, p.operators):
            np.testing.assert_array_equal(a.eigs, b.eigs)


class TestInvariantEnforcement:
    def test_problem_rejects_wrong_y(self):
        p = synthetic_diagonal(64, a=1.0, u=1.0, tau=0.5)
        bad = p.y.coeffs.copy()
        bad[0] *= 2.0
        with pytest.raises(ValueError):
            Problem(L=p.L, T=p.T, link=p.link, exact=p.exact, y=CoeffVector(bad))

    def test_problem_rejects_broken_link(self):
        p = synthetic_diagonal(64, a=1.0, u=1.0, tau=0.5)
        svals = p.T.svals.copy()
        svals[3] *= 1.5
        T = ForwardOperator(svals)
        y = CoeffVector(svals * p.x_dag.coeffs)
        with pytest.raises(ValueError):
            Problem(L=p.L, T=T, link=p.link, exact=p.exact, y=y)

    def test_smoothing_link_validation(self):
        with pytest.raises(ValueError):
            SmoothingLink(a=1.0, m=2.0, M=1.0)
        with pytest.raises(ValueError):
            SmoothingLink(a=0.0, m=1.0, M=1.0)

    def test_certify_records_norm_exactly(self):
        L = ScaleOperator(np.arange(1.0, 65.0))
        x = CoeffVector(np.arange(1.0, 65.0) ** -2)
        exact = ExactSolution.certify(L, x, u=1.0)
        assert exact.u_norm > 0
        assert 0 <= exact.tail_fraction < 1
