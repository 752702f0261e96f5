import math

import numpy as np
import pytest

from hilscale import (
    DivergenceError,
    certify,
    landweber,
    residual,
    showalter,
    tikhonov,
    tsvd,
)
from hilscale.regularizers import filter as filter_value

ALL_FAMILIES = [tikhonov(), tsvd(), landweber(1.0), showalter()]


class TestFilterValues:
    def test_tikhonov_midpoint(self):
        assert filter_value(tikhonov(), 1.0, 1.0) == 0.5

    def test_tsvd_below_cutoff(self):
        assert filter_value(tsvd(), 0.5, 0.25) == 0.0

    def test_tsvd_above_cutoff_inverts(self):
        assert filter_value(tsvd(), 0.5, 2.0) == 0.5

    def test_showalter_small_lambda_series(self):
        # series oracle: (1 - exp(-lam))/lam = 1 - lam/2 + lam**2/6 - ...
        fam = showalter()
        for lam in (1e-3, 1e-6, 1e-9):
            series = 1.0 - lam / 2.0 + lam**2 / 6.0
            # next series term is lam**3/24; floor the tolerance at a few ulps
            assert filter_value(fam, 1.0, lam) == pytest.approx(series, abs=max(lam**3, 1e-15))
        assert filter_value(fam, 1.0, 0.0) == 1.0

    def test_landweber_iteration_count_identification(self):
        fam = landweber(0.5)
        alpha, lam = 0.3, 0.8
        m = math.ceil(1.0 / alpha)
        expected = (1.0 - (1.0 - 0.5 * lam) ** m) / lam
        assert filter_value(fam, alpha, lam) == pytest.approx(expected, rel=1e-13)
        assert filter_value(fam, alpha, 0.0) == m * 0.5

    def test_landweber_divergence_guard(self):
        with pytest.raises(DivergenceError):
            filter_value(landweber(2.0), 0.5, 1.0)

    def test_nonpositive_alpha_rejected(self):
        with pytest.raises(ValueError):
            filter_value(tikhonov(), 0.0, 1.0)


class TestResidual:
    @pytest.mark.parametrize("family", ALL_FAMILIES, ids=lambda f: f.kind)
    def test_unit_residual_at_zero(self, family):
        assert residual(family, 1.0, 0.0) == 1.0

    def test_tikhonov_midpoint(self):
        assert residual(tikhonov(), 1.0, 1.0) == 0.5

    def test_tsvd_exact_inversion_above_cutoff(self):
        assert residual(tsvd(), 0.5, 0.5) == 0.0
        assert residual(tsvd(), 0.5, 3.0) == 0.0

    @pytest.mark.parametrize("family", ALL_FAMILIES, ids=lambda f: f.kind)
    def test_defining_identity_is_exact(self, family):
        lam = np.logspace(-8, 0, 40)
        for alpha in (1e-4, 1e-2, 0.7):
            g = filter_value(family, alpha, lam)
            r = residual(family, alpha, lam)
            np.testing.assert_array_equal(r + lam * g, np.ones_like(lam))


class TestCertify:
    def test_tikhonov_c1_reaches_one_at_mu_one(self):
        # grid-max oracle: sup over lambda of lambda/(lambda+alpha) <= 1
        rep = certify(tikhonov(), Lambda=1.0)
        entry = rep.c3_entry(1.0)
        assert entry.c_mu <= 1.0 + 1e-12
        assert entry.passed

    def test_tikhonov_half_qualification_constant(self):
        # calculus oracle: max of lam**mu * alpha/(lam+alpha) at
        # lam = mu*alpha/(1-mu) gives c_mu = mu**mu * (1-mu)**(1-mu) = 0.5
        rep = certify(tikhonov(), Lambda=1.0)
        assert rep.c3_entry(0.5).c_mu == pytest.approx(0.5, rel=0.02)

    def test_tikhonov_saturates_beyond_qualification(self):
        rep = certify(tikhonov(), Lambda=1.0, mus=(0.5, 1.0, 2.0))
        entry = rep.c3_entry(2.0)
        assert not entry.passed
        assert entry.growth >= 0.9

    def test_tsvd_unit_constant_every_mu(self):
        rep = certify(tsvd(), Lambda=1.0, mus=np.arange(0.0, 4.01, 0.5))
        lam = np.logspace(-12, 0, 512)
        for entry in rep.c3:
            # grid-max oracle evaluated independently
            oracle = max(
                np.max(lam[lam < a] ** entry.mu) / a**entry.mu
                for a in np.logspace(-6, 0, 25)
            )
            assert entry.c_mu == pytest.approx(oracle, rel=1e-12)
            assert entry.c_mu <= 1.0 + 1e-12
            assert entry.passed

    @pytest.mark.parametrize("family", [tsvd(), landweber(1.0), showalter()],
                             ids=lambda f: f.kind)
    def test_unbounded_qualification_families_pass_to_four(self, family):
        rep = certify(family, Lambda=1.0, mus=np.arange(0.0, 4.01, 0.25))
        assert rep.c1_passed and rep.c2_passed
        assert all(entry.passed for entry in rep.c3)

    @pytest.mark.parametrize("family", ALL_FAMILIES, ids=lambda f: f.kind)
    def test_c2_within_family_constant(self, family):
        rep = certify(family, Lambda=1.0)
        assert rep.c2_passed
        assert rep.c2_worst <= family.c_hat * (1 + 1e-9)

    @pytest.mark.parametrize("family", ALL_FAMILIES, ids=lambda f: f.kind)
    def test_composite_filter_bound(self, family):
        # lam**beta * |g| <= k * alpha**(beta-1) on a beta grid in [0, 1]
        lam = np.logspace(-10, 0, 256)
        for alpha in np.logspace(-5, 0, 9):
            g = np.abs(filter_value(family, alpha, lam))
            for beta in np.linspace(0.0, 1.0, 5):
                bound = family.k_const * alpha ** (beta - 1.0)
                assert np.max(lam**beta * g) <= bound * (1 + 1e-9)

    def test_k_const_composition(self):
        # k = max(1 + c_0, c_hat) with c_0 = sup |r| = 1 for all four kinds
        assert tikhonov().k_const == 2.0
        assert tsvd().k_const == 2.0
        assert showalter().k_const == 2.0
        assert landweber(3.0).k_const == 6.0

    def test_report_json_schema(self):
        doc = certify(tikhonov(), Lambda=1.0).to_json()
        assert set(doc) == {"family", "conditions"}
        assert set(doc["conditions"]) == {"C1", "C2", "C3"}
        assert set(doc["conditions"]["C2"]) == {"c_hat", "worst"}
        assert all(set(e) == {"mu", "c_mu"} for e in doc["conditions"]["C3"])

    def test_rejects_bad_lambda(self):
        with pytest.raises(ValueError):
            certify(tikhonov(), Lambda=0.0)
