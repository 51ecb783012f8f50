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

"""スナップショット形式の車両位置トレースの読み書きと、車線ごとの車間距離分布を扱うモジュール

CSV のヘッダは ``snapshot_id,lane_id,position_m`` で固定とし、同名の ``.json`` に
メタデータを置く。
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

import numpy as np
from scipy import integrate

from ._types import FloatArray
from .constants import DEFAULT_DROP_FIRST
from .errors import DomainError, InsufficientDataError, TraceFormatError
from .fitting import GapSample
from .hardcore import HardcoreLaneModel
from .models.metadata import GroundTruth, TraceMetadata
from .sampling import LaneSnapshot, RngSeed, sample_hardcore_lane
from .spatial_stats import Window


logger = logging.getLogger(__name__)

HEADER = ("snapshot_id", "lane_id", "position_m")


@dataclass
class TraceFile:
    """Vehicle positions keyed by (snapshot_id, lane_id) on a common roadway extent."""

    lanes: dict[tuple[int, int], FloatArray]
    extent: tuple[float, float]
    metadata: TraceMetadata

    def __post_init__(self) -> None:
        a, b = self.extent
        if not b > a:
            raise DomainError(f"degenerate extent [{a}, {b}]")
        for key, positions in self.lanes.items():
            if positions.size and (positions[0] < a or positions[-1] > b):
                raise TraceFormatError(f"snapshot {key[0]} lane {key[1]} leaves the extent [{a}, {b}]")

    @property
    def snapshot_ids(self) -> list[int]:
        return sorted({s for s, _ in self.lanes})

    @property
    def lane_ids(self) -> list[int]:
        return sorted({lane for _, lane in self.lanes})

    @property
    def n_rows(self) -> int:
        return sum(p.size for p in self.lanes.values())

    def snapshot(self, snapshot_id: int, lane_id: int) -> LaneSnapshot:
        try:
            positions = self.lanes[(snapshot_id, lane_id)]
        except KeyError:
            raise InsufficientDataError(f"no vehicles in snapshot {snapshot_id}, lane {lane_id}") from None
        return LaneSnapshot(positions, self.extent, lane_id)

    def snapshots(self, lane_id: int) -> Iterator[LaneSnapshot]:
        for snapshot_id in self.snapshot_ids:
            if (snapshot_id, lane_id) in self.lanes:
                yield self.snapshot(snapshot_id, lane_id)

    def rows(self) -> Iterator[tuple[int, int, float]]:
        for (snapshot_id, lane_id) in sorted(self.lanes):
            for x in self.lanes[(snapshot_id, lane_id)]:
                yield snapshot_id, lane_id, float(x)


def metadata_path(path: Path) -> Path:
    return path.with_suffix(".json")


def read_metadata(path: Path) -> Optional[TraceMetadata]:
    sidecar = metadata_path(path)
    if not sidecar.exists():
        return None
    return TraceMetadata.from_json(sidecar.read_text(encoding="utf-8"))  # type: ignore[attr-defined]


def parse_trace(path: Path | str, drop_first: int = DEFAULT_DROP_FIRST) -> TraceFile:
    """Read a trace CSV and its sidecar metadata.

    Duplicate positions within one (snapshot, lane) are collapsed with a warning. The first
    ``drop_first`` snapshots are discarded as warm-up.
    """
    path = Path(path)
    if drop_first < 0:
        raise DomainError(f"drop_first must be nonnegative, got {drop_first}")
    collected: dict[tuple[int, int], list[float]] = {}
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise TraceFormatError(f"{path} is empty", line=1)
        if tuple(h.strip() for h in header) != HEADER:
            raise TraceFormatError(f"expected header {','.join(HEADER)}", line=1)
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != 3:
                raise TraceFormatError(f"expected 3 fields, got {len(row)}", line=line)
            try:
                key = (int(row[0]), int(row[1]))
                position = float(row[2])
            except ValueError as e:
                raise TraceFormatError(str(e), line=line) from e
            if not np.isfinite(position):
                raise TraceFormatError(f"position {row[2]!r} is not finite", line=line)
            collected.setdefault(key, []).append(position)
    if not collected:
        raise TraceFormatError(f"{path} holds no rows", line=2)

    lanes: dict[tuple[int, int], FloatArray] = {}
    for key, values in collected.items():
        positions = np.unique(np.asarray(values))
        if positions.size < len(values):
            logger.warning(
                "snapshot %d lane %d: %d duplicate positions collapsed", key[0], key[1], len(values) - positions.size
            )
        lanes[key] = positions

    if drop_first:
        kept = sorted({s for s, _ in lanes})[drop_first:]
        if not kept:
            raise InsufficientDataError(f"dropping {drop_first} snapshots leaves none")
        keep = set(kept)
        lanes = {k: v for k, v in lanes.items() if k[0] in keep}

    metadata = read_metadata(path)
    if metadata is None:
        lo = min(float(p[0]) for p in lanes.values())
        hi = max(float(p[-1]) for p in lanes.values())
        if not hi > lo:
            hi = lo + 1.0
        metadata = TraceMetadata(
            name=path.stem, granularity_s=1.0, extent_m=[lo, hi], lanes=sorted({lane for _, lane in lanes})
        )
    extent = (float(metadata.extent_m[0]), float(metadata.extent_m[1]))
    return TraceFile(lanes, extent, metadata)


def format_position(x: float) -> str:
    """Shortest round-trip decimal with at least two places."""
    return np.format_float_positional(x, unique=True, min_digits=2, trim="k")


def write_trace(trace: TraceFile, path: Path | str, with_metadata: bool = True) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(HEADER)
        for snapshot_id, lane_id, x in trace.rows():
            writer.writerow((snapshot_id, lane_id, format_position(x)))
    if with_metadata:
        metadata_path(path).write_text(trace.metadata.to_json(indent=2), encoding="utf-8")  # type: ignore[attr-defined]
    logger.info("wrote %d rows to %s", trace.n_rows, path)
    return path


def gaps(trace: TraceFile, snapshot_id: int, lane_id: int, window: Window | float | None = None) -> GapSample:
    """Consecutive differences of the positions inside ``window`` (a Window or a margin in meters)."""
    snapshot = trace.snapshot(snapshot_id, lane_id)
    if window is None:
        window = 0.0
    if not isinstance(window, Window):
        window = Window.for_snapshot(snapshot, float(window))
    lo, hi = window.indices(snapshot)
    inside = snapshot.positions[lo:hi]
    if inside.size < 3:
        raise InsufficientDataError(
            f"snapshot {snapshot_id} lane {lane_id}: {inside.size} vehicles in the window, three are needed"
        )
    return GapSample(np.diff(inside), lane_id)


def lane_gaps(trace: TraceFile, lane_id: int, margin: float = 0.0) -> GapSample:
    """Gaps of every snapshot of one lane pooled together; snapshots with < 2 vehicles are skipped."""
    pooled = []
    for snapshot in trace.snapshots(lane_id):
        lo, hi = Window.for_snapshot(snapshot, margin).indices(snapshot)
        pooled.append(np.diff(snapshot.positions[lo:hi]))
    values = np.concatenate(pooled) if pooled else np.empty(0)
    if values.size == 0:
        raise InsufficientDataError(f"lane {lane_id} has no gaps in the trace")
    return GapSample(values, lane_id)


@dataclass(frozen=True)
class EmpiricalCdf:
    """Piecewise-linear CDF through the sorted sample, probabilities i/(n − 1).

    Sampling inverts it by linear interpolation, so draws fill the range between observed
    gaps. It can stand in for a lane's gap law in the simulator.
    """

    support: FloatArray
    probabilities: FloatArray
    _residual_grid: tuple[FloatArray, FloatArray] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        x = np.asarray(self.support, dtype=float)
        p = np.asarray(self.probabilities, dtype=float)
        if x.ndim != 1 or x.size == 0 or x.shape != p.shape:
            raise DomainError("support and probabilities must be nonempty 1-D arrays of equal length")
        if np.any(np.diff(x) < 0) or np.any(np.diff(p) <= 0) or p[-1] != 1.0 or p[0] < 0 or x[0] < 0:
            raise DomainError("not a valid CDF")
        object.__setattr__(self, "support", x)
        object.__setattr__(self, "probabilities", p)
        # residual-gap CDF (1/m) ∫₀^x (1 − F), tabulated on [0, support]
        grid = np.concatenate([[0.0], x]) if x[0] > 0 else x
        survival = 1.0 - np.interp(grid, x, p, left=0.0)
        cumulative = integrate.cumulative_trapezoid(survival, grid, initial=0.0)
        object.__setattr__(self, "_residual_grid", (cumulative / cumulative[-1] if cumulative[-1] > 0 else cumulative, grid))

    def __call__(self, x: float | np.ndarray) -> float | FloatArray:
        value = np.interp(x, self.support, self.probabilities, left=0.0, right=1.0)
        return float(value) if np.ndim(value) == 0 else value

    def _check_u(self, u: np.ndarray) -> None:
        if np.any(u < 0) or np.any(u > 1) or np.any(np.isnan(u)):
            raise DomainError("u must lie in [0, 1]")

    def inverse_sample(self, u: float | np.ndarray) -> float | FloatArray:
        """Quantile by linear interpolation: 0 maps to the smallest gap and 1 to the largest."""
        u_arr = np.asarray(u, dtype=float)
        self._check_u(u_arr)
        value = np.interp(u_arr, self.probabilities, self.support, left=float(self.support[0]))
        return float(value) if value.ndim == 0 else value

    def residual_sample(self, u: float | np.ndarray) -> float | FloatArray:
        """Inverse of the equilibrium residual-gap CDF, the distance from an arbitrary location to the next vehicle."""
        u_arr = np.asarray(u, dtype=float)
        self._check_u(u_arr)
        cumulative, grid = self._residual_grid
        value = np.interp(u_arr, cumulative, grid)
        return float(value) if value.ndim == 0 else value

    @property
    def mean(self) -> float:
        x, p = self.support, self.probabilities
        if x.size == 1:
            return float(x[0])
        return float(x[0] * p[0] + np.sum(np.diff(p) * (x[1:] + x[:-1]) / 2.0))

    @property
    def minimum(self) -> float:
        return float(self.support[0])

    def draw(self, rng: np.random.Generator, size: int | tuple[int, ...]) -> FloatArray:
        return np.asarray(self.inverse_sample(rng.random(size=size)))

    def residual(self, rng: np.random.Generator, size: int | tuple[int, ...]) -> FloatArray:
        return np.asarray(self.residual_sample(rng.random(size=size)))


def empirical_cdf(sample: GapSample | np.ndarray) -> EmpiricalCdf:
    values = np.sort(sample.gaps if isinstance(sample, GapSample) else np.asarray(sample, dtype=float).ravel())
    if values.size == 0:
        raise InsufficientDataError("an empirical CDF needs at least one gap")
    if values.size == 1:
        return EmpiricalCdf(values, np.ones(1))
    return EmpiricalCdf(values, np.linspace(0.0, 1.0, values.size))


def inverse_sample(cdf: EmpiricalCdf, u: float | np.ndarray) -> float | FloatArray:
    return cdf.inverse_sample(u)


def generate_synthetic_trace(
    models: list[HardcoreLaneModel],
    n_snapshots: int,
    extent: tuple[float, float],
    seed: int,
    name: str = "synthetic",
    granularity_s: float = 1.0,
) -> TraceFile:
    """Independent stationary snapshots of every lane; the generator parameters go into the metadata."""
    if not models:
        raise DomainError("at least one lane model is required")
    if n_snapshots < 1:
        raise DomainError(f"at least one snapshot is required, got {n_snapshots}")
    lanes: dict[tuple[int, int], FloatArray] = {}
    for snapshot_id in range(n_snapshots):
        base = RngSeed(seed, snapshot_id)
        for lane_id, model in enumerate(models):
            lane = sample_hardcore_lane(model, extent, base.substream(lane_id), lane_id)
            lanes[(snapshot_id, lane_id)] = lane.positions
    metadata = TraceMetadata(
        name=name,
        granularity_s=granularity_s,
        extent_m=[float(extent[0]), float(extent[1])],
        lanes=list(range(len(models))),
        ground_truth=[GroundTruth(lane_id=i, lam=m.lam, c=m.c) for i, m in enumerate(models)],
    )
    logger.debug("generated %d snapshots of %d lanes", n_snapshots, len(models))
    return TraceFile(lanes, (float(extent[0]), float(extent[1])), metadata)
