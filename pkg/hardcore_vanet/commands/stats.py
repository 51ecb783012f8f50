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

"""hcvanet stats サブコマンドモジュール"""

from pathlib import Path
from typing import Optional

from ..constants import R_MAX_J, R_MAX_L
from ..errors import ConfigurationError, DomainError
from ..export import write_envelope, write_summary_curve
from ..hardcore import SummaryCurve, SummaryKind, summary_curve
from ..spatial_stats import (
    Window,
    default_r_grid,
    empirical_contact_cdf,
    empirical_j,
    empirical_k,
    empirical_l,
    empirical_nn_cdf,
    envelope,
    observation_limits,
    simulate_envelope,
)
from ..traces import parse_trace
from ._common import AppContext, parse_lane, pick


ENVELOPE_KINDS = (SummaryKind.J, SummaryKind.L)


def _r_max(kind: SummaryKind, r_max: Optional[float]) -> float:
    if r_max is not None:
        return r_max
    return R_MAX_L if kind in (SummaryKind.K, SummaryKind.L) else R_MAX_J


def run(
    app: AppContext,
    model: Optional[str],
    trace_path: Optional[Path],
    statistics: tuple[str, ...],
    r_max: Optional[float],
    snapshot: Optional[int],
    lane: int,
    window_margin: Optional[float],
    envelope_runs: int,
    length_km: float,
    drop_first: int,
    seed: Optional[int],
    fmt: Optional[str],
) -> list[Path]:
    """閉形式 (--model) またはトレースの経験値 (--trace) の要約統計量を書き出す

    ``envelope_runs`` が正なら J と L について包絡線も書き出す。
    """

    if (model is None) == (trace_path is None):
        raise ConfigurationError("give exactly one of --model and --trace")
    kinds = [SummaryKind(s.upper()) for s in statistics]
    seed = pick(seed, app.config.simulation.seed)
    out_format = app.output_format(fmt)
    directory = app.output_dir()
    written: list[Path] = []

    if model is not None:
        lane_model = parse_lane(model)
        for kind in kinds:
            grid = default_r_grid(_r_max(kind, r_max))
            curve = summary_curve(lane_model, kind, grid)
            written.append(write_summary_curve(curve, directory / f"{kind.value}_model", out_format))
        if envelope_runs > 0:
            extent = (0.0, length_km * 1000.0)
            for kind in kinds:
                if kind not in ENVELOPE_KINDS:
                    continue
                grid = default_r_grid(_r_max(kind, r_max))
                margin = pick(window_margin, float(grid[-1]))
                with app.ui.open_spinner(f"simulating {envelope_runs} realizations for the {kind.value} envelope"):
                    band = simulate_envelope(kind, lane_model, envelope_runs, extent, margin, grid, seed=seed)
                written.append(write_envelope(band, directory / f"{kind.value}_envelope", out_format))
    else:
        assert trace_path is not None
        trace = parse_trace(trace_path, drop_first=drop_first)
        snapshot_id = trace.snapshot_ids[0] if snapshot is None else snapshot
        snap = trace.snapshot(snapshot_id, lane)
        for kind in kinds:
            grid = default_r_grid(_r_max(kind, r_max))
            window = Window.for_snapshot(snap, pick(window_margin, float(grid[-1])))
            curve: SummaryCurve
            if kind is SummaryKind.J:
                curve = empirical_j(snap, window, grid, seed=seed)
            elif kind is SummaryKind.G:
                curve = empirical_nn_cdf(snap, window, grid)
            elif kind is SummaryKind.F:
                curve = empirical_contact_cdf(snap, window, grid, seed=seed)
            elif kind is SummaryKind.L:
                curve = empirical_l(snap, window, grid)
            elif kind is SummaryKind.K:
                curve = empirical_k(snap, window, grid)
            else:
                raise DomainError("the pair correlation has no empirical estimator here")
            written.append(write_summary_curve(curve, directory / f"{kind.value}_empirical", out_format))
            if kind is SummaryKind.J:
                r_f, r_g = observation_limits(snap, window)
                app.ui.info(f"snapshot {snapshot_id} lane {lane}: F̂ informative up to {r_f:.1f} m, Ĝ up to {r_g:.1f} m")
            if envelope_runs > 0 and kind in ENVELOPE_KINDS:
                snaps = list(trace.snapshots(lane))[:envelope_runs]
                band = envelope(kind, snaps, window, grid, seed=seed)
                written.append(write_envelope(band, directory / f"{kind.value}_envelope", out_format))

    for path in written:
        app.ui.wrote(path)
    return written
