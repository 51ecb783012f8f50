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

"""車線の実現値を乱数生成するモジュール

定常 Cowan M2、原点に点を条件付けた (Palm) Cowan M2、PPP、およびリンク距離を生成する。
乱数は SeedSequence の spawn_key で分岐させるため、(seed, stream) が同じなら
並列実行でも同じ実現値が得られる。
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from ._types import FloatArray
from .constants import MIN_EXPECTED_POINTS
from .errors import DomainError
from .hardcore import HardcoreLaneModel


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RngSeed:
    """A reproducible random stream: ``seed`` picks the experiment, ``stream`` the substream."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(sequence))

    def substream(self, index: int) -> RngSeed:
        """Independent child stream, e.g. one per Monte-Carlo shard."""
        return RngSeed(self.seed, self.stream * 1_000_003 + index + 1)


SeedLike = RngSeed | int | np.random.Generator


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, RngSeed):
        return seed.generator()
    return RngSeed(int(seed)).generator()


@dataclass(frozen=True)
class LaneSnapshot:
    """Sorted vehicle positions of one lane at one instant, observed on ``extent``."""

    positions: FloatArray
    extent: tuple[float, float]
    lane_id: int = 0

    def __post_init__(self) -> None:
        positions = np.asarray(self.positions, dtype=float)
        a, b = (float(v) for v in self.extent)
        if not b > a:
            raise DomainError(f"degenerate extent [{a}, {b}]")
        if positions.ndim != 1:
            raise DomainError("positions must be one-dimensional")
        if positions.size and (positions[0] < a or positions[-1] > b):
            raise DomainError(f"positions fall outside the extent [{a}, {b}]")
        if np.any(np.diff(positions) <= 0):
            raise DomainError("positions must be strictly increasing")
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "extent", (a, b))

    @property
    def length(self) -> float:
        return self.extent[1] - self.extent[0]

    @property
    def n_points(self) -> int:
        return int(self.positions.size)

    @property
    def gaps(self) -> FloatArray:
        return np.diff(self.positions)


class GapLaw(Protocol):
    """Distribution of the distance between successive vehicles of a lane."""

    @property
    def mean(self) -> float: ...

    @property
    def minimum(self) -> float: ...

    def draw(self, rng: np.random.Generator, size: int | tuple[int, ...]) -> FloatArray: ...

    def residual(self, rng: np.random.Generator, size: int | tuple[int, ...]) -> FloatArray: ...


def equilibrium_residual(model: HardcoreLaneModel, u: float | np.ndarray) -> FloatArray:
    """Inverse of the equilibrium residual-gap CDF.

    F_e(x) = λx for x ≤ c and λ(c + (1 − e^{−μ(x−c)})/μ) beyond, the forward-recurrence
    distance seen from an arbitrary location of a stationary lane.
    """
    u = np.asarray(u, dtype=float)
    lam, c, mu = model.lam, model.c, model.mu
    inside = u <= lam * c
    tail = c - np.log1p(-mu * np.maximum(u / lam - c, 0.0)) / mu
    return np.where(inside, u / lam, tail)


@dataclass(frozen=True)
class ModelGapLaw:
    """Shifted-exponential gaps c + Exp(μ) of a :class:`HardcoreLaneModel`."""

    model: HardcoreLaneModel

    @property
    def mean(self) -> float:
        return self.model.mean_gap

    @property
    def minimum(self) -> float:
        return self.model.c

    def draw(self, rng: np.random.Generator, size: int | tuple[int, ...]) -> FloatArray:
        return self.model.c + rng.exponential(1.0 / self.model.mu, size=size)

    def residual(self, rng: np.random.Generator, size: int | tuple[int, ...]) -> FloatArray:
        return equilibrium_residual(self.model, rng.random(size=size))


def renewal_positions(
    start: float,
    limit: float,
    draw: Callable[[np.random.Generator, int], FloatArray],
    rng: np.random.Generator,
    batch: int,
) -> FloatArray:
    """Points start, start + g₁, start + g₁ + g₂, … up to ``limit`` inclusive."""
    if start > limit:
        return np.empty(0)
    chunks = [np.array([start])]
    last = start
    batch = max(int(batch), 16)
    while True:
        cumulative = last + np.cumsum(draw(rng, batch))
        inside = cumulative[cumulative <= limit]
        chunks.append(inside)
        if inside.size < batch:
            return np.concatenate(chunks)
        last = float(cumulative[-1])


def _batch_for(length: float, mean_gap: float) -> int:
    expected = length / mean_gap
    return int(expected + 6.0 * np.sqrt(expected) + 16)


def sample_hardcore_lane(
    model: HardcoreLaneModel,
    extent: tuple[float, float],
    seed: SeedLike,
    lane_id: int = 0,
) -> LaneSnapshot:
    """Stationary Cowan M2 realization on ``extent``.

    The first point is placed at the equilibrium residual distance from the left boundary and
    the remaining gaps are i.i.d. c + Exp(μ), so the realization carries no boundary transient.
    """
    a, b = (float(v) for v in extent)
    if not b > a:
        raise DomainError(f"degenerate extent [{a}, {b}]")
    expected = model.lam * (b - a)
    if expected < MIN_EXPECTED_POINTS:
        logger.warning("only %.1f points expected on an extent of %.1f m", expected, b - a)
    rng = as_generator(seed)
    law = ModelGapLaw(model)
    first = a + float(law.residual(rng, 1)[0])
    positions = renewal_positions(first, b, law.draw, rng, _batch_for(b - a, model.mean_gap))
    return LaneSnapshot(positions, (a, b), lane_id)


def sample_palm_conditioned(
    model: HardcoreLaneModel,
    extent_behind: float,
    extent_front: float,
    seed: SeedLike,
    lane_id: int = 0,
) -> LaneSnapshot:
    """Cowan M2 seen from one of its points, placed at the origin.

    Gaps renew outward on both sides of the origin, front side first.
    """
    if not (extent_behind > 0 and extent_front > 0):
        raise DomainError("both extents must be positive")
    rng = as_generator(seed)
    law = ModelGapLaw(model)
    front = renewal_positions(0.0, extent_front, law.draw, rng, _batch_for(extent_front, model.mean_gap))
    behind = renewal_positions(0.0, extent_behind, law.draw, rng, _batch_for(extent_behind, model.mean_gap))
    positions = np.concatenate([-behind[:0:-1], front])
    return LaneSnapshot(positions, (-float(extent_behind), float(extent_front)), lane_id)


def sample_ppp_lane(
    lam: float,
    extent: tuple[float, float],
    seed: SeedLike,
    lane_id: int = 0,
) -> LaneSnapshot:
    """Homogeneous Poisson lane: Poisson(λ·length) points placed uniformly."""
    if not lam > 0:
        raise DomainError(f"intensity must be positive, got {lam!r}")
    a, b = (float(v) for v in extent)
    if not b > a:
        raise DomainError(f"degenerate extent [{a}, {b}]")
    rng = as_generator(seed)
    count = rng.poisson(lam * (b - a))
    positions = np.unique(rng.uniform(a, b, size=count))
    return LaneSnapshot(positions, (a, b), lane_id)


def sample_link_distance(
    model: HardcoreLaneModel,
    seed: SeedLike,
    size: int | None = None,
) -> float | FloatArray:
    """Transmitter-receiver distance d = c + Exp(μ)."""
    draws = ModelGapLaw(model).draw(as_generator(seed), 1 if size is None else size)
    return float(draws[0]) if size is None else draws
