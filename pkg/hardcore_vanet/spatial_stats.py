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

"""スナップショットから経験的な要約統計量を推定するモジュール

境界補正にはマイナスサンプリングを用いる。参照点は内側の窓に限定し、
最近傍や点数の計数にはスナップショット全体を使う。
"""

from __future__ import annotations

import warnings
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ._types import Curve, FloatArray
from .constants import J_UNDEFINED_GUARD, N_PROBES, R_MAX_J, R_MAX_L, R_STEP
from .errors import DomainError, InsufficientDataError, NumericError, WindowError
from .hardcore import HardcoreLaneModel, SummaryCurve, SummaryKind
from .sampling import LaneSnapshot, RngSeed, SeedLike, as_generator, sample_hardcore_lane


@dataclass(frozen=True)
class Window:
    """Inner interval [a + margin, b − margin] of an observation extent."""

    a: float
    b: float
    margin: float

    def __post_init__(self) -> None:
        if self.margin < 0:
            raise WindowError(f"margin must be nonnegative, got {self.margin!r}")
        if not self.a + self.margin < self.b - self.margin:
            raise WindowError(f"margin {self.margin} leaves nothing of [{self.a}, {self.b}]")

    @classmethod
    def for_snapshot(cls, snapshot: LaneSnapshot, margin: float) -> Window:
        return cls(snapshot.extent[0], snapshot.extent[1], float(margin))

    @property
    def inner(self) -> tuple[float, float]:
        return self.a + self.margin, self.b - self.margin

    def require(self, r_max: float) -> None:
        if self.margin < r_max:
            raise WindowError(f"window margin {self.margin} m is below r_max = {r_max} m")

    def indices(self, snapshot: LaneSnapshot) -> tuple[int, int]:
        lo, hi = self.inner
        p = snapshot.positions
        return int(np.searchsorted(p, lo, "left")), int(np.searchsorted(p, hi, "right"))


@dataclass(frozen=True)
class Envelope:
    """Pointwise min/max band of a statistic over several realizations."""

    r_grid: FloatArray
    lower: FloatArray
    upper: FloatArray
    n_realizations: int
    kind: SummaryKind

    @classmethod
    def from_curves(cls, curves: Sequence[SummaryCurve]) -> Envelope:
        if not curves:
            raise InsufficientDataError("an envelope needs at least one curve")
        grid = curves[0].r_grid
        for curve in curves[1:]:
            if not np.array_equal(curve.r_grid, grid):
                raise DomainError("curves of an envelope must share one r grid")
        stack = np.vstack([curve.values for curve in curves])
        with warnings.catch_warnings():
            # columns where every realization is undefined stay NaN
            warnings.simplefilter("ignore", RuntimeWarning)
            lower = np.nanmin(stack, axis=0)
            upper = np.nanmax(stack, axis=0)
        return cls(grid, lower, upper, len(curves), curves[0].kind)

    def contains(self, values: np.ndarray, tolerance: float = 0.0) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        return (values >= self.lower - tolerance) & (values <= self.upper + tolerance)


def default_r_grid(r_max: float, step: float = R_STEP) -> FloatArray:
    return np.arange(0.0, r_max + step / 2, step)


def _window_points(snapshot: LaneSnapshot, window: Window) -> tuple[int, int]:
    lo, hi = window.indices(snapshot)
    if hi - lo == 0:
        raise WindowError("no point of the snapshot lies in the window")
    return lo, hi


def nearest_neighbor_distances(snapshot: LaneSnapshot, window: Window) -> FloatArray:
    """Nearest-neighbor distance of every window point; neighbors may lie outside the window."""
    lo, hi = _window_points(snapshot, window)
    p = snapshot.positions
    gaps = np.concatenate([[np.inf], np.diff(p), [np.inf]])
    return np.minimum(gaps[lo:hi], gaps[lo + 1 : hi + 1])


def _ecdf(samples: np.ndarray, r_grid: np.ndarray) -> FloatArray:
    ordered = np.sort(samples)
    return np.searchsorted(ordered, r_grid, side="right") / ordered.size


def empirical_nn_cdf(
    snapshot: LaneSnapshot,
    window: Window,
    r_grid: np.ndarray | None = None,
) -> SummaryCurve:
    """Ĝ, the empirical CDF of nearest-neighbor distances of the window points."""
    grid = default_r_grid(R_MAX_J) if r_grid is None else np.asarray(r_grid, dtype=float)
    window.require(float(grid[-1]))
    lo, hi = _window_points(snapshot, window)
    if snapshot.n_points < 2:
        raise InsufficientDataError("Ĝ needs at least two points")
    return SummaryCurve(grid, _ecdf(nearest_neighbor_distances(snapshot, window), grid), SummaryKind.G)


def contact_distances(snapshot: LaneSnapshot, probes: np.ndarray) -> FloatArray:
    p = snapshot.positions
    if p.size == 0:
        return np.full(probes.shape, np.inf)
    right = np.searchsorted(p, probes)
    after = p[np.minimum(right, p.size - 1)]
    before = p[np.maximum(right - 1, 0)]
    return np.minimum(np.abs(after - probes), np.abs(probes - before))


def empirical_contact_cdf(
    snapshot: LaneSnapshot,
    window: Window,
    r_grid: np.ndarray | None = None,
    n_probes: int = N_PROBES,
    seed: SeedLike = 0,
) -> SummaryCurve:
    """F̂ from ``n_probes`` uniform locations in the window."""
    if n_probes < 1:
        raise DomainError("F̂ needs at least one probe")
    grid = default_r_grid(R_MAX_J) if r_grid is None else np.asarray(r_grid, dtype=float)
    window.require(float(grid[-1]))
    lo, hi = window.inner
    probes = as_generator(seed).uniform(lo, hi, size=n_probes)
    return SummaryCurve(grid, _ecdf(contact_distances(snapshot, probes), grid), SummaryKind.F)


def empirical_j(
    snapshot: LaneSnapshot,
    window: Window,
    r_grid: np.ndarray | None = None,
    n_probes: int = N_PROBES,
    seed: SeedLike = 0,
) -> SummaryCurve:
    """Ĵ = (1 − Ĝ)/(1 − F̂); NaN where 1 − F̂ drops below the guard."""
    g = empirical_nn_cdf(snapshot, window, r_grid)
    f = empirical_contact_cdf(snapshot, window, g.r_grid, n_probes, seed)
    survivor = 1.0 - f.values
    defined = survivor >= J_UNDEFINED_GUARD
    values = np.full_like(survivor, np.nan)
    values[defined] = (1.0 - g.values[defined]) / survivor[defined]
    return SummaryCurve(g.r_grid, values, SummaryKind.J)


def estimate_intensity(snapshot: LaneSnapshot) -> float:
    """Inverse of the mean gap of the snapshot."""
    if snapshot.n_points < 2:
        raise InsufficientDataError("intensity needs at least two points")
    return 1.0 / float(np.mean(snapshot.gaps))


def _mean_counts(snapshot: LaneSnapshot, window: Window, grid: np.ndarray) -> FloatArray:
    lo, hi = _window_points(snapshot, window)
    p = snapshot.positions
    centers = p[lo:hi, None]
    upper = np.searchsorted(p, centers + grid[None, :], side="right")
    lower = np.searchsorted(p, centers - grid[None, :], side="left")
    return np.mean(upper - lower - 1, axis=0)


def empirical_l(
    snapshot: LaneSnapshot,
    window: Window,
    r_grid: np.ndarray | None = None,
) -> SummaryCurve:
    """L̂(r): mean number of other points within r of a window point, over 2λ̂."""
    grid = default_r_grid(R_MAX_L) if r_grid is None else np.asarray(r_grid, dtype=float)
    window.require(float(grid[-1]))
    lam = estimate_intensity(snapshot)
    return SummaryCurve(grid, _mean_counts(snapshot, window, grid) / (2.0 * lam), SummaryKind.L)


def empirical_k(
    snapshot: LaneSnapshot,
    window: Window,
    r_grid: np.ndarray | None = None,
) -> SummaryCurve:
    l_hat = empirical_l(snapshot, window, r_grid)
    return SummaryCurve(l_hat.r_grid, 2.0 * l_hat.values, SummaryKind.K)


def observation_limits(snapshot: LaneSnapshot, window: Window) -> tuple[float, float]:
    """(r_f, r_g): half the largest gap and the largest nearest-neighbor distance.

    F̂ carries no information beyond r_f and Ĝ none beyond r_g.
    """
    if snapshot.n_points < 2:
        raise InsufficientDataError("observation limits need at least two points")
    r_f = float(np.max(snapshot.gaps)) / 2.0
    r_g = float(np.max(nearest_neighbor_distances(snapshot, window)))
    return r_f, r_g


def envelope(
    statistic: SummaryKind | str,
    realizations: Sequence[LaneSnapshot],
    window: Window,
    r_grid: np.ndarray | None = None,
    n_probes: int = N_PROBES,
    seed: int = 0,
) -> Envelope:
    """Envelope of Ĵ or L̂ over ``realizations``; probes of run i use stream i of ``seed``."""
    kind = SummaryKind(statistic)
    if kind is SummaryKind.J:
        curves = [
            empirical_j(snapshot, window, r_grid, n_probes, RngSeed(seed, i))
            for i, snapshot in enumerate(realizations)
        ]
    elif kind is SummaryKind.L:
        curves = [empirical_l(snapshot, window, r_grid) for snapshot in realizations]
    else:
        raise DomainError(f"envelopes are provided for J and L, not {kind.value}")
    return Envelope.from_curves(curves)


def simulate_envelope(
    statistic: SummaryKind | str,
    model: HardcoreLaneModel,
    n_runs: int,
    extent: tuple[float, float],
    margin: float,
    r_grid: np.ndarray | None = None,
    n_probes: int = N_PROBES,
    seed: int = 0,
) -> Envelope:
    """Envelope over ``n_runs`` fresh realizations of ``model`` (c = 0 gives the PPP band)."""
    if n_runs < 1:
        raise DomainError("an envelope needs at least one run")
    base = RngSeed(seed)
    snapshots = [sample_hardcore_lane(model, extent, base.substream(i)) for i in range(n_runs)]
    window = Window(extent[0], extent[1], margin)
    return envelope(statistic, snapshots, window, r_grid, n_probes, seed + 1)


def _grid_values(curve: Curve) -> tuple[FloatArray, FloatArray]:
    return np.asarray(curve.grid, dtype=float), np.asarray(curve.values, dtype=float)


def ks_distance(cdf_a: Curve, cdf_b: Curve) -> float:
    """Largest vertical distance between two curves.

    Curves on different grids are compared on the union of both grids restricted to their
    common range, each resampled by linear interpolation. Undefined (NaN) values are rejected.
    """
    xa, ya = _grid_values(cdf_a)
    xb, yb = _grid_values(cdf_b)
    if np.isnan(ya).any() or np.isnan(yb).any():
        raise NumericError("a curve holds undefined values, the KS distance is not defined")
    if xa.shape == xb.shape and np.array_equal(xa, xb):
        return float(np.max(np.abs(ya - yb)))
    lo, hi = max(xa[0], xb[0]), min(xa[-1], xb[-1])
    if lo > hi:
        raise DomainError("curves have disjoint supports")
    grid = np.union1d(xa, xb)
    grid = grid[(grid >= lo) & (grid <= hi)]
    return float(np.max(np.abs(np.interp(grid, xa, ya) - np.interp(grid, xb, yb))))
