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

import math

import numpy as np
import pytest
from scipy import integrate, special as sp

from hardcore_vanet.errors import DomainError
from hardcore_vanet.special import hyp2f1_guardzone, hyp2f1_outage, pi_csc, regularized_upper_gamma


def euler_hyp2f1(b: float, z: float) -> float:
    value, _ = integrate.quad(
        lambda t: 1.0 / (1.0 + z * t), 0.0, 1.0, weight="alg", wvar=(b - 1.0, 0.0), epsabs=1e-13, epsrel=1e-12
    )
    return b * value


class TestRegularizedUpperGamma:
    def test_first_order_is_exponential(self):
        x = np.linspace(0.0, 20.0, 41)
        np.testing.assert_allclose(regularized_upper_gamma(1, x), np.exp(-x), rtol=1e-14, atol=0)

    def test_finite_sum(self):
        assert regularized_upper_gamma(3, 2.0) == pytest.approx(5.0 * math.exp(-2.0), rel=1e-14)

    def test_zero_argument(self):
        assert regularized_upper_gamma(7, 0.0) == 1.0

    def test_scalar_in_scalar_out(self):
        assert isinstance(regularized_upper_gamma(2, 1.0), float)

    @pytest.mark.parametrize("k", [1, 2, 5, 12, 30])
    def test_matches_scipy_gammaincc(self, k):
        x = np.linspace(0.0, 50.0, 101)
        np.testing.assert_allclose(regularized_upper_gamma(k, x), sp.gammaincc(k, x), atol=1e-12)

    @pytest.mark.parametrize("k, x", [(0, 1.0), (1.5, 1.0), (-2, 1.0), (2, -0.1), (2, float("nan"))])
    def test_rejects_outside_domain(self, k, x):
        with pytest.raises(DomainError):
            regularized_upper_gamma(k, x)


class TestHypergeometric:
    def test_guardzone_quarter_pi(self):
        assert hyp2f1_guardzone(2.0, 1.0) == pytest.approx(math.pi / 4, abs=1e-12)

    @pytest.mark.parametrize("theta", [0.0, 0.01, 0.5, 0.89, 0.91, 3.0, 100.0])
    def test_outage_family_at_eta_two_is_arctangent(self, theta):
        expected = 1.0 if theta == 0 else math.atan(math.sqrt(theta)) / math.sqrt(theta)
        assert hyp2f1_outage(2.0, theta) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("eta", [2.0, 3.0, 4.0])
    def test_both_families_against_euler_integral(self, eta):
        for z in np.logspace(-2, 2, 9):
            assert hyp2f1_outage(eta, z) == pytest.approx(euler_hyp2f1(1.0 - 1.0 / eta, z), abs=1e-8)
            assert hyp2f1_guardzone(eta, z) == pytest.approx(euler_hyp2f1(1.0 / eta, z), abs=1e-8)

    def test_continuous_across_switch_point(self):
        below = hyp2f1_outage(3.0, 0.9 - 1e-9)
        above = hyp2f1_outage(3.0, 0.9 + 1e-9)
        assert below == pytest.approx(above, abs=1e-8)

    def test_vectorized_shape(self):
        theta = np.array([[0.1, 1.0], [10.0, 100.0]])
        assert np.asarray(hyp2f1_outage(3.0, theta)).shape == (2, 2)

    def test_rejects_small_eta(self):
        with pytest.raises(DomainError):
            hyp2f1_outage(1.0, 1.0)
        with pytest.raises(DomainError):
            hyp2f1_guardzone(0.5, 1.0)

    def test_rejects_negative_argument(self):
        with pytest.raises(DomainError):
            hyp2f1_outage(3.0, -0.5)


def test_pi_csc():
    assert pi_csc(2.0) == pytest.approx(math.pi / 2)
    assert pi_csc(4.0) == pytest.approx((math.pi / 4) / math.sin(math.pi / 4))
