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
import math

import numpy as np
import pytest

from hardcore_vanet.errors import DomainError, InvalidModelError
from hardcore_vanet.hardcore import (
    HardcoreLaneModel,
    SummaryKind,
    contact_cdf,
    j_function,
    k_function,
    l_function,
    n_th_order_correlation,
    nearest_neighbor_cdf,
    pcf,
    pcf_normalized,
    summary_curve,
    third_order_correlation,
)

MU = 1.0 / 24.0


class TestModel:
    def test_coupling(self, model):
        assert model.mu == pytest.approx(MU, rel=1e-14)
        assert 1.0 / model.lam == pytest.approx(model.c + 1.0 / model.mu, rel=1e-14)

    def test_from_rate(self):
        m = HardcoreLaneModel.from_rate(MU, 16.0)
        assert m.lam == pytest.approx(0.025, rel=1e-14)

    def test_ppp(self, poisson):
        assert poisson.is_poisson
        assert poisson.mu == poisson.lam

    @pytest.mark.parametrize("lam, c", [(0.1, 10.0), (0.1, 12.0), (0.0, 1.0), (-0.1, 1.0), (0.1, -1.0)])
    def test_rejects_invalid(self, lam, c):
        with pytest.raises(InvalidModelError):
            HardcoreLaneModel.from_intensity(lam, c)

    def test_rejects_inconsistent_triple(self):
        with pytest.raises(InvalidModelError):
            HardcoreLaneModel(lam=0.025, c=16.0, mu=0.05)

    def test_json_uses_lambda_key(self, model):
        doc = json.loads(model.to_json())
        assert set(doc) == {"lambda", "c", "mu"}
        assert HardcoreLaneModel.from_json(model.to_json()) == model

    def test_packing(self, model):
        assert model.packing == pytest.approx(0.4)
        assert model.mean_gap == pytest.approx(40.0)


class TestPairCorrelation:
    def test_vanishes_inside_hardcore(self, model):
        np.testing.assert_array_equal(pcf(model, np.array([0.0, 5.0, 16.0])), 0.0)

    def test_first_band(self, model):
        expected = 0.025 * MU * math.exp(-MU * 8.0)
        assert pcf(model, 24.0) == pytest.approx(expected, rel=1e-12)

    def test_second_band_adds_gamma_term(self, model):
        r = 40.0
        expected = 0.025 * (MU * math.exp(-MU * 24.0) + MU**2 * 8.0 * math.exp(-MU * 8.0))
        assert pcf(model, r) == pytest.approx(expected, rel=1e-12)

    def test_symmetric(self, model):
        assert pcf(model, -30.0) == pcf(model, 30.0)

    def test_tends_to_lambda_squared(self, model):
        assert pcf(model, 3000.0) == pytest.approx(0.025**2, rel=1e-6)

    def test_normalized_plateau(self, model):
        assert pcf_normalized(model, 3000.0) == pytest.approx(1.0 - 0.4, rel=1e-6)

    def test_poisson(self, poisson):
        assert pcf(poisson, 3.0) == 0.025**2

    def test_third_order_product_form(self, model):
        expected = pcf(model, 20.0) * pcf(model, 25.0) / 0.025
        assert third_order_correlation(model, 45.0, 20.0, 0.0) == pytest.approx(expected)
        assert third_order_correlation(model, 0.0, 45.0, 20.0) == pytest.approx(expected)

    def test_third_order_zero_within_hardcore(self, model):
        assert third_order_correlation(model, 0.0, 10.0, 50.0) == 0.0

    def test_nth_order_reduces_to_pair(self, model):
        assert n_th_order_correlation(model, [0.0, 30.0]) == pytest.approx(pcf(model, 30.0))

    def test_nth_order_needs_two_points(self, model):
        with pytest.raises(DomainError):
            n_th_order_correlation(model, [1.0])


class TestSummaryFunctions:
    def test_j_inner_branch(self, model):
        assert j_function(model, 5.0) == pytest.approx(1.0 / 0.75)

    def test_j_middle_branch(self, model):
        assert j_function(model, 12.0) == pytest.approx(math.exp(MU * 8.0) / 0.6)

    def test_j_constant_beyond_hardcore(self, model):
        expected = math.exp(MU * 16.0) / 0.6
        np.testing.assert_allclose(j_function(model, np.array([16.0, 40.0, 400.0])), expected, rtol=1e-12)

    def test_j_continuous(self, model):
        for r in (8.0, 16.0):
            assert j_function(model, r - 1e-9) == pytest.approx(j_function(model, r + 1e-9), rel=1e-6)

    def test_j_at_least_one(self, model):
        assert np.all(j_function(model, np.linspace(0.0, 100.0, 201)) >= 1.0)

    def test_j_poisson(self, poisson):
        np.testing.assert_array_equal(j_function(poisson, np.array([0.0, 5.0, 50.0])), 1.0)

    def test_k_single_term(self, model):
        assert k_function(model, 20.0) == pytest.approx(80.0 * (1.0 - math.exp(-4.0 / 24.0)), rel=1e-12)
        assert l_function(model, 20.0) == pytest.approx(40.0 * (1.0 - math.exp(-4.0 / 24.0)), rel=1e-12)

    def test_k_zero_inside_hardcore(self, model):
        assert k_function(model, 15.9) == 0.0

    def test_l_below_identity(self, model):
        r = np.linspace(0.0, 500.0, 251)
        assert np.all(l_function(model, r) <= r + 1e-9)

    def test_l_poisson_is_identity(self, poisson):
        r = np.array([0.0, 3.0, 100.0])
        np.testing.assert_allclose(l_function(poisson, r), r)

    def test_g(self, model):
        assert nearest_neighbor_cdf(model, 10.0) == 0.0
        assert nearest_neighbor_cdf(model, 20.0) == pytest.approx(1.0 - math.exp(-1.0 / 3.0))

    def test_f(self, model):
        assert contact_cdf(model, 8.0) == pytest.approx(0.4)
        assert contact_cdf(model, 4.0) == pytest.approx(0.2)
        assert contact_cdf(model, 20.0) == pytest.approx(1.0 - 0.6 * math.exp(-MU * 24.0))

    def test_j_consistent_with_g_and_f(self, model):
        r = np.linspace(0.0, 60.0, 121)
        np.testing.assert_allclose(
            j_function(model, r), (1.0 - nearest_neighbor_cdf(model, r)) / (1.0 - contact_cdf(model, r)), rtol=1e-10
        )

    def test_negative_distance(self, model):
        with pytest.raises(DomainError):
            j_function(model, -1.0)

    def test_summary_curve(self, model):
        grid = np.arange(0.0, 50.0, 5.0)
        curve = summary_curve(model, "J", grid)
        assert curve.kind is SummaryKind.J
        np.testing.assert_array_equal(curve.values, j_function(model, grid))
        np.testing.assert_array_equal(curve.grid, grid)

    def test_summary_curve_rejects_unsorted_grid(self, model):
        with pytest.raises(DomainError):
            summary_curve(model, SummaryKind.K, np.array([1.0, 0.5]))
