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

"""hcvanet simulate サブコマンドモジュール"""

from pathlib import Path
from typing import Optional

from ..errors import ConfigurationError
from ..export import write_outage_curve
from ..fitting import fit_ppp_mle
from ..interference import OutageCurve
from ..montecarlo import McConfig, McSource, run_manifest, simulate_outage
from ..traces import empirical_cdf, lane_gaps, parse_trace
from ._common import AppContext, build_scenario, parse_lanes, pick, resolve_link_lane


def run(
    app: AppContext,
    lanes: Optional[str],
    trace_path: Optional[Path],
    link_lane: Optional[int],
    runs: Optional[int],
    seed: Optional[int],
    jobs: Optional[int],
    roadway_km: Optional[float],
    drop_first: int,
    eta: Optional[float],
    xi: Optional[float],
    g: Optional[float],
    ell: Optional[float],
    phi: Optional[float],
    theta_db: Optional[str],
    fmt: Optional[str],
) -> OutageCurve:
    """モデル (--lanes) またはトレースの車間距離分布 (--trace) から停止確率をシミュレーションする

    トレースの場合、各車線の経験 CDF を線形補間で逆変換して車間距離を生成する。
    """

    if (lanes is None) == (trace_path is None):
        raise ConfigurationError("give exactly one of --lanes and --trace")
    simulation = app.config.simulation
    laws = None
    if lanes is not None:
        models = parse_lanes(lanes)
        link = resolve_link_lane(link_lane, len(models))
    else:
        assert trace_path is not None
        trace = parse_trace(trace_path, drop_first=drop_first)
        samples = [lane_gaps(trace, lane_id) for lane_id in trace.lane_ids]
        link = resolve_link_lane(link_lane, len(samples))
        # lane models only size the truncation check
        models = [fit_ppp_mle(s).to_model() for s in samples]
        cdfs = [empirical_cdf(s) for s in samples]
        laws = (cdfs[link], *(cdf for i, cdf in enumerate(cdfs) if i != link))
    scenario, _ = build_scenario(app, models, link, eta, xi, g, ell, phi, theta_db)

    config = McConfig(
        n_runs=pick(runs, simulation.n_runs),
        seed=pick(seed, simulation.seed),
        roadway_length=pick(None if roadway_km is None else roadway_km * 1000.0, simulation.roadway_length),
        source=McSource.MODEL if laws is None else McSource.TRACE,
        trace_laws=laws,
        jobs=pick(jobs, simulation.jobs),
    )
    with app.ui.open_spinner(f"simulating {config.n_runs} runs on {config.jobs} workers"):
        curve = simulate_outage(config, scenario)
    manifest = run_manifest(config, scenario)
    path = write_outage_curve(curve, app.output_dir() / "outage_mc", app.output_format(fmt), manifest)
    app.ui.wrote(path, f"{config.n_runs} runs, seed {config.seed}, scenario {manifest.scenario_hash[:12]}")
    return curve
