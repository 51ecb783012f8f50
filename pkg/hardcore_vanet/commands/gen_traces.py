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

"""hcvanet gen-traces サブコマンドモジュール"""

from pathlib import Path
from typing import Optional

from ..traces import generate_synthetic_trace, write_trace
from ._common import AppContext, parse_lanes, pick


def run(
    app: AppContext,
    lanes: str,
    snapshots: int,
    length_km: float,
    seed: Optional[int],
    name: str,
    output: Optional[Path],
) -> Path:
    """合成トレースを生成し、CSV とメタデータを書き出す"""

    models = parse_lanes(lanes)
    seed = pick(seed, app.config.simulation.seed)
    path = output if output is not None else app.output_dir() / f"{name}.csv"
    with app.ui.open_spinner(f"sampling {snapshots} snapshots of {len(models)} lanes"):
        trace = generate_synthetic_trace(models, snapshots, (0.0, length_km * 1000.0), seed, name=name)
        write_trace(trace, path)
    app.ui.wrote(path, f"{trace.n_rows} vehicles in {snapshots} snapshots, seed {seed}")
    return path
