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

import numpy as np
import pytest

from hardcore_vanet.errors import DomainError
from hardcore_vanet.hardcore import HardcoreLaneModel
from hardcore_vanet.sampling import (
    LaneSnapshot,
    ModelGapLaw,
    RngSeed,
    equilibrium_residual,
    sample_hardcore_lane,
    sample_link_distance,
    sample_palm_conditioned,
    sample_ppp_lane,
)


class TestRngSeed:
    def test_reproducible(self):
        a = RngSeed(7).generator().random(5)
        b = RngSeed(7).generator().random(5)
        np.testing.assert_array_equal(a, b)

    def test_substreams_differ(self):
        base = RngSeed(7)
        a = base.substream(0).generator().random(5)
        b = base.substream(1).generator().random(5)
        assert not np.array_equal(a, b)
        assert base.substream(0) == RngSeed(7).substream(0)


class TestEquilibriumResidual:
    def test_uniform_part(self, model):
        u = np.array([0.0, 0.1, 0.4])
        np.testing.assert_allclose(equilibrium_residual(model, u), u / model.lam)

    def test_continuous_at_hardcore(self, model):
        edge = model.lam * model.c
        assert equilibrium_residual(model, edge - 1e-12) == pytest.approx(equilibrium_residual(model, edge + 1e-12))

    def test_poisson_is_exponential(self, poisson):
        u = np.linspace(0.0, 0.99, 12)
        np.testing.assert_allclose(equilibrium_residual(poisson, u), -np.log1p(-u) / poisson.lam, rtol=1e-12)

    def test_mean(self, model):
        # E[Z²] / (2 E[Z]) for Z = c + Exp(μ)
        expected = (model.c**2 + 2 * model.c / model.mu + 2 / model.mu**2) / (2 * model.mean_gap)
        residuals = ModelGapLaw(model).residual(RngSeed(3).generator(), 200_000)
        assert np.mean(residuals) == pytest.approx(expected, rel=0.01)


class TestSnapshots:
    def test_hardcore_lane_respects_hardcore(self, model):
        snapshot = sample_hardcore_lane(model, (0.0, 20_000.0), seed=1)
        assert snapshot.n_points > 300
        assert np.all(snapshot.gaps >= model.c)
        assert snapshot.positions[0] >= 0.0 and snapshot.positions[-1] <= 20_000.0

    def test_hardcore_lane_intensity(self, model):
        snapshot = sample_hardcore_lane(model, (0.0, 200_000.0), seed=2)
        assert snapshot.n_points / snapshot.length == pytest.approx(model.lam, rel=0.05)

    def test_hardcore_lane_reproducible(self, model):
        a = sample_hardcore_lane(model, (0.0, 5_000.0), seed=RngSeed(4, 2))
        b = sample_hardcore_lane(model, (0.0, 5_000.0), seed=RngSeed(4, 2))
        np.testing.assert_array_equal(a.positions, b.positions)

    def test_palm_conditioned_has_point_at_origin(self, model):
        snapshot = sample_palm_conditioned(model, 2_000.0, 3_000.0, seed=5)
        assert 0.0 in snapshot.positions
        assert snapshot.extent == (-2_000.0, 3_000.0)
        assert np.all(snapshot.gaps >= model.c)

    def test_ppp_lane(self):
        snapshot = sample_ppp_lane(0.02, (0.0, 500_000.0), seed=6)
        assert snapshot.n_points / snapshot.length == pytest.approx(0.02, rel=0.05)

    def test_link_distance(self, model):
        assert sample_link_distance(model, seed=1) >= model.c
        draws = sample_link_distance(model, seed=1, size=50_000)
        assert np.min(draws) >= model.c
        assert np.mean(draws) == pytest.approx(model.mean_gap, rel=0.02)

    def test_degenerate_extent(self, model):
        with pytest.raises(DomainError):
            sample_hardcore_lane(model, (10.0, 10.0), seed=0)

    def test_snapshot_rejects_unsorted(self):
        with pytest.raises(DomainError):
            LaneSnapshot(np.array([3.0, 1.0]), (0.0, 5.0))

    def test_snapshot_rejects_points_outside_extent(self):
        with pytest.raises(DomainError):
            LaneSnapshot(np.array([1.0, 7.0]), (0.0, 5.0))


def test_model_gap_law(model):
    law = ModelGapLaw(model)
    assert law.mean == pytest.approx(40.0)
    assert law.minimum == 16.0
    draws = law.draw(RngSeed(0).generator(), (3, 4))
    assert draws.shape == (3, 4)
    assert np.all(draws >= 16.0)


def test_poisson_sampler_without_hardcore():
    model = HardcoreLaneModel.ppp(0.05)
    snapshot = sample_hardcore_lane(model, (0.0, 400_000.0), seed=9)
    assert snapshot.n_points / snapshot.length == pytest.approx(0.05, rel=0.05)
