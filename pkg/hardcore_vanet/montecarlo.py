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

"""直接サンプリングによる SIR 停止確率と干渉モーメントのシミュレータを定義するモジュール

試行は固定サイズのチャンクに分割し、チャンクごとに独立な乱数サブストリームを割り当てる。
そのため結果はワーカー数に依存しない。
"""

from __future__ import annotations

import enum
import hashlib
import logging
import math
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

import numpy as np
from scipy import stats

from . import __version__
from ._types import FloatArray
from .constants import MC_CHUNK_SIZE, MC_ROADWAY_LENGTH, MC_RUNS, MC_TRUNCATION_BOUND
from .errors import ConfigurationError, DomainError
from .interference import (
    LinkScenario,
    MomentTriple,
    OutageCurve,
    OutageProvenance,
    moments_other_lane,
    palm_moments_behind,
)
from .models.manifest import RunManifest
from .sampling import GapLaw, ModelGapLaw, RngSeed


logger = logging.getLogger(__name__)


class McSource(str, enum.Enum):
    MODEL = "MODEL"
    TRACE = "TRACE"


@dataclass(frozen=True)
class McConfig:
    """Monte-Carlo settings.

    ``roadway_length`` is the extent simulated on each side of the receiver. With a TRACE
    source ``trace_laws`` holds one gap law per lane, link lane first and then the other lanes
    in scenario order. Without ``own_lane_interference`` only the other lanes interfere, the
    link lane still supplies the link distance.
    """

    n_runs: int = MC_RUNS
    seed: int = 0
    roadway_length: float = MC_ROADWAY_LENGTH
    source: McSource = McSource.MODEL
    trace_laws: Optional[tuple[GapLaw, ...]] = None
    chunk_size: int = MC_CHUNK_SIZE
    jobs: int = 1
    own_lane_interference: bool = True

    def __post_init__(self) -> None:
        if self.n_runs < 1:
            raise ConfigurationError(f"at least one run is required, got {self.n_runs}")
        if not self.roadway_length > 0:
            raise ConfigurationError(f"roadway length must be positive, got {self.roadway_length!r}")
        if self.chunk_size < 1 or self.jobs < 1:
            raise ConfigurationError("chunk size and job count must be positive")
        object.__setattr__(self, "source", McSource(self.source))
        if self.source is McSource.TRACE and not self.trace_laws:
            raise ConfigurationError("a TRACE source needs one empirical gap law per lane")

    def lane_laws(self, scenario: LinkScenario) -> tuple[GapLaw, ...]:
        if self.source is McSource.MODEL:
            models = [scenario.own_lane_model, *(lane.model for lane in scenario.other_lanes)]
            return tuple(ModelGapLaw(m) for m in models)
        assert self.trace_laws is not None
        if len(self.trace_laws) != 1 + len(scenario.other_lanes):
            raise ConfigurationError(
                f"{len(self.trace_laws)} gap laws given for {1 + len(scenario.other_lanes)} lanes"
            )
        return tuple(self.trace_laws)


def check_truncation(config: McConfig, scenario: LinkScenario) -> None:
    """Reject roadways too short for the interference beyond their ends to be negligible.

    The dropped tail of each lane is bounded by λξ(1+g) L^{1−η}/(η−1) and compared with the
    lane's analytic mean interference at a typical link distance.
    """
    if scenario.xi == 0:
        return
    eta, L = scenario.eta, config.roadway_length
    own = scenario.own_lane_model
    lanes = []
    if config.own_lane_interference:
        lanes.append((own, palm_moments_behind(own, scenario, own.c + own.mean_gap).mean))
    lanes += [
        (lane.model, moments_other_lane(lane.model, scenario, r0).mean)
        for lane, r0 in zip(scenario.other_lanes, scenario.guard_zones())
    ]
    for model, mean in lanes:
        tail = model.lam * scenario.xi * (1 + scenario.g) * L ** (1 - eta) / (eta - 1)
        if tail > MC_TRUNCATION_BOUND * mean:
            raise ConfigurationError(
                f"roadway length {L:g} m leaves a tail of {tail / mean:.2g} of the mean interference; "
                "use a longer roadway"
            )


def _renewal_matrix(
    start: np.ndarray,
    limit: float,
    law: GapLaw,
    rng: np.random.Generator,
) -> np.ndarray:
    """Row i holds start[i] + g₁ + … + g_j for j ≥ 1, padded with +inf beyond ``limit``."""
    n_cols = int(max(limit - float(np.min(start)), 0.0) / law.mean * 1.2) + 16
    offsets = np.cumsum(law.draw(rng, (start.size, n_cols)), axis=1)
    positions = start[:, None] + offsets
    while np.any(positions[:, -1] <= limit):
        more = positions[:, -1:] + np.cumsum(law.draw(rng, (start.size, 16)), axis=1)
        positions = np.concatenate([positions, more], axis=1)
    return np.where(positions <= limit, positions, np.inf)


def _lane_power(
    distance: np.ndarray,
    gain: np.ndarray | float,
    eta: float,
    xi: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Σ active h·a·r^{−η} per row; +inf distances contribute nothing."""
    fading = rng.exponential(1.0, size=distance.shape)
    active = rng.random(size=distance.shape) < xi
    with np.errstate(divide="ignore"):
        power = np.where(np.isfinite(distance), distance ** (-eta), 0.0)
    return np.sum(power * fading * active * gain, axis=1)


def _simulate_chunk(
    scenario: LinkScenario,
    laws: tuple[GapLaw, ...],
    roadway_length: float,
    own_lane_interference: bool,
    seed: int,
    index: int,
    size: int,
) -> FloatArray:
    rng = RngSeed(seed).substream(index).generator()
    eta, xi, g, L = scenario.eta, scenario.xi, scenario.g, roadway_length
    own = laws[0]

    d = own.draw(rng, size)
    h_t = rng.exponential(1.0, size=size)
    interference = np.zeros(size)
    if own_lane_interference:
        # receiver at 0, transmitter at −d
        behind = _renewal_matrix(d, L, own, rng)
        front = _renewal_matrix(np.zeros(size), L, own, rng)
        interference += _lane_power(behind, 1.0, eta, xi, rng) + _lane_power(front, g, eta, xi, rng)

    for law, r0 in zip(laws[1:], scenario.guard_zones()):
        start = -L + law.residual(rng, size)
        x = np.concatenate([start[:, None], _renewal_matrix(start, L, law, rng)], axis=1)
        distance = np.where((np.abs(x) >= r0) & np.isfinite(x), np.abs(x), np.inf)
        interference += _lane_power(distance, np.where(x > 0, g, 1.0), eta, xi, rng)

    signal = h_t * d ** (-eta)
    with np.errstate(divide="ignore"):
        return np.where(interference > 0, signal / interference, np.inf)


def _chunks(config: McConfig) -> list[tuple[int, int]]:
    n_full, rest = divmod(config.n_runs, config.chunk_size)
    sizes = [config.chunk_size] * n_full + ([rest] if rest else [])
    return list(enumerate(sizes))


def simulate_sir(config: McConfig, scenario: LinkScenario) -> FloatArray:
    """Per-run SIR samples, in run order, for the scenario's link."""
    check_truncation(config, scenario)
    laws = config.lane_laws(scenario)
    chunks = _chunks(config)
    logger.debug("simulating %d runs in %d chunks on %d workers", config.n_runs, len(chunks), config.jobs)
    args = [(scenario, laws, config.roadway_length, config.own_lane_interference, config.seed, i, n) for i, n in chunks]
    if config.jobs == 1 or len(chunks) == 1:
        parts = [_simulate_chunk(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            parts = list(pool.map(_simulate_chunk, *zip(*args)))
    return np.concatenate(parts)


def outage_from_sir(sir: np.ndarray, theta_grid: Sequence[float] | np.ndarray) -> OutageCurve:
    """Fraction of runs with SIR < θ, with the binomial standard error per threshold."""
    sir = np.sort(np.asarray(sir, dtype=float))
    if sir.size == 0:
        raise DomainError("no SIR samples")
    theta = np.asarray(theta_grid, dtype=float)
    p_out = np.searchsorted(sir, theta, side="left") / sir.size
    std_error = np.sqrt(p_out * (1.0 - p_out) / sir.size)
    return OutageCurve(theta, p_out, OutageProvenance.MONTE_CARLO, std_error)


def simulate_outage(config: McConfig, scenario: LinkScenario) -> OutageCurve:
    """Monte-Carlo outage curve on the scenario's threshold grid."""
    return outage_from_sir(simulate_sir(config, scenario), scenario.theta)


def simulate_interference_moments(config: McConfig, scenario: LinkScenario, d: float) -> MomentTriple:
    """Sample mean, variance and skewness of the interference from behind a transmitter ``d`` away.

    Only the link lane's vehicles behind the transmitter contribute, seen from a receiver at
    fixed distance ``d``.
    """
    if not d > 0:
        raise DomainError(f"link distance must be positive, got {d!r}")
    check_truncation(config, scenario)
    law = config.lane_laws(scenario)[0]
    samples = []
    for index, size in _chunks(config):
        rng = RngSeed(config.seed).substream(index).generator()
        behind = _renewal_matrix(np.full(size, float(d)), config.roadway_length, law, rng)
        samples.append(_lane_power(behind, 1.0, scenario.eta, scenario.xi, rng))
    power = np.concatenate(samples)
    return MomentTriple(
        mean=float(np.mean(power)),
        variance=float(np.var(power, ddof=1)) if power.size > 1 else 0.0,
        skewness=float(stats.skew(power)) if power.size > 2 else math.nan,
    )


def scenario_hash(scenario: LinkScenario) -> str:
    return hashlib.sha256(scenario.to_json(sort_keys=True).encode()).hexdigest()  # type: ignore[attr-defined]


def run_manifest(config: McConfig, scenario: LinkScenario) -> RunManifest:
    return RunManifest(
        seed=config.seed,
        n_runs=config.n_runs,
        chunk_size=config.chunk_size,
        roadway_length=config.roadway_length,
        source=config.source.value,
        scenario_hash=scenario_hash(scenario),
        version=__version__,
        created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )
