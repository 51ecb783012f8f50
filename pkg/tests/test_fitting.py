#  Copyright 2025 Shoji Kumagai
#
#  Licensed under the Apache License, Version 2.0 (the "License");
#  you may not use this file except in compliance with the License.
#  You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
#  Unless required by applicable law or agreed to in writing, software
#  distributed under the License is distributed on an "AS IS" BASIS,
#  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#  See the License for the specific language governing permissions and
#  limitations under the License.

import json

import numpy as np
import pytest

from hardcore_vanet.errors import DomainError, FittingError, InsufficientDataError
from hardcore_vanet.fitting import (
    FitMethod,
    FitResult,
    GapSample,
    fit_all,
    fit_hc_mle,
    fit_lsq,
    fit_mom,
    fit_ppp_mle,
    fit_shifted_exponential_cdf,
    shifted_exponential_cdf,
)
from hardcore_vanet.hardcore import HardcoreLaneModel
from hardcore_vanet.sampling import ModelGapLaw, RngSeed


@pytest.fixture(scope="module")
def simulated() -> GapSample:
    """5000 gaps of a lane with λ = 0.025 and λc = 0.3."""
    model = HardcoreLaneModel.from_intensity(0.025, 12.0)
    return GapSample(ModelGapLaw(model).draw(RngSeed(21).generator(), 5_000), lane_id=3)


class TestGapSample:
    @pytest.mark.parametrize("gaps", [[], [20.0]])
    def test_needs_two_gaps(self, gaps):
        with pytest.raises(InsufficientDataError):
            GapSample(np.array(gaps))

    @pytest.mark.parametrize("gaps", [[1.0, 0.0], [1.0, -2.0], [1.0, np.inf]])
    def test_invalid(self, gaps):
        with pytest.raises(DomainError):
            GapSample(np.array(gaps))

    def test_ecdf(self):
        sample = GapSample(np.array([10.0, 20.0, 30.0, 40.0]))
        np.testing.assert_allclose(sample.ecdf(np.array([5.0, 10.0, 25.0, 40.0])), [0.0, 0.25, 0.5, 1.0])


class TestClosedFormEstimators:
    gaps = GapSample(np.array([20.0, 30.0, 40.0]))

    def test_ppp(self):
        result = fit_ppp_mle(self.gaps)
        assert result.method is FitMethod.PPP_MLE
        assert result.lambda_hat == pytest.approx(1 / 30)
        assert result.c_hat is None
        assert result.to_model().is_poisson

    def test_mom(self):
        result = fit_mom(self.gaps)
        assert result.c_hat == pytest.approx(20.0)
        assert result.lambda_hat == pytest.approx(1 / 30)
        assert result.mu_hat == pytest.approx(0.1)
        assert not result.clamped

    def test_mom_clamps_negative_hardcore(self):
        result = fit_mom(GapSample(np.array([1.0, 1.0, 100.0])))
        assert result.c_hat == 0.0
        assert result.clamped
        assert result.raw_c_hat < 0

    def test_mom_constant_gaps(self):
        with pytest.raises(FittingError):
            fit_mom(GapSample(np.array([5.0, 5.0, 5.0])))

    def test_hc_mle(self):
        result = fit_hc_mle(self.gaps)
        assert result.c_hat == 20.0
        assert result.lambda_hat == pytest.approx(1 / 30)
        assert result.mu_hat == pytest.approx(0.1)

    def test_hc_mle_constant_gaps(self):
        with pytest.raises(FittingError):
            fit_hc_mle(GapSample(np.array([7.0, 7.0])))


class TestLeastSquares:
    def test_shifted_exponential_cdf(self):
        x = np.array([0.0, 10.0, 20.0])
        np.testing.assert_allclose(shifted_exponential_cdf(x, 0.1, 10.0), [0.0, 0.0, 1.0 - np.exp(-1.0)])

    def test_recovers_exact_curve(self):
        x = np.linspace(0.0, 200.0, 201)
        mu, c, rss = fit_shifted_exponential_cdf(x, shifted_exponential_cdf(x, 0.05, 10.0))
        assert mu == pytest.approx(0.05, rel=1e-3)
        assert c == pytest.approx(10.0, abs=1e-2)
        assert rss < 1e-8

    def test_fixed_intensity_searches_hardcore_only(self):
        x = np.linspace(0.0, 200.0, 201)
        lam = 0.05 / (1 + 0.05 * 10.0)
        mu, c, _ = fit_shifted_exponential_cdf(x, shifted_exponential_cdf(x, 0.05, 10.0), fixed_lambda=lam)
        assert c == pytest.approx(10.0, abs=1e-2)
        assert mu == pytest.approx(lam / (1 - lam * c))

    def test_mismatched_shapes(self):
        with pytest.raises(DomainError):
            fit_shifted_exponential_cdf(np.arange(5.0), np.zeros(4))

    def test_too_few_bins(self, simulated):
        with pytest.raises(DomainError):
            fit_lsq(simulated, bins=np.array([0.0, 50.0, 100.0]))


class TestOnSimulatedLane:
    def test_hc_mle(self, simulated):
        result = fit_hc_mle(simulated)
        assert result.c_hat == pytest.approx(12.0, abs=0.1)
        assert result.lambda_hat == pytest.approx(0.025, rel=0.05)

    def test_mom(self, simulated):
        result = fit_mom(simulated)
        assert result.c_hat == pytest.approx(12.0, abs=3.0)

    @pytest.mark.parametrize("fix_intensity", [False, True])
    def test_lsq(self, simulated, fix_intensity):
        result = fit_lsq(simulated, fix_intensity=fix_intensity)
        assert result.c_hat == pytest.approx(12.0, abs=3.0)
        assert result.lambda_hat == pytest.approx(0.025, rel=0.05)
        assert result.lane_id == 3
        assert result.rss is not None and result.rss < 0.05

    def test_fit_all_order(self, simulated):
        methods = [r.method for r in fit_all(simulated)]
        assert methods == list(FitMethod)

    def test_estimates_respect_packing_bound(self, simulated):
        for result in fit_all(simulated):
            model = result.to_model()
            assert 0.0 <= model.c <= 1.0 / model.lam


def test_fit_result_serializes_method_name():
    result = FitResult(lane_id=1, method=FitMethod.HC_MLE, lambda_hat=0.02, c_hat=10.0, mu_hat=0.025)
    doc = json.loads(result.to_json())
    assert doc["method"] == "HC_MLE"
    assert FitResult.from_dict(doc).method is FitMethod.HC_MLE
