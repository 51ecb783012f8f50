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

"""hcvanet gof サブコマンドモジュール"""

from pathlib import Path

from ..export import read_outage_curve
from ..spatial_stats import ks_distance
from ._common import AppContext


def run(app: AppContext, curve_a: Path, curve_b: Path) -> float:
    """2 つの停止確率曲線の Kolmogorov-Smirnov 距離 (最大の縦方向の差) を出力する"""

    a = read_outage_curve(curve_a)
    b = read_outage_curve(curve_b)
    distance = ks_distance(a, b)
    app.ui.echo(f"KS({curve_a.name}, {curve_b.name}) = {distance:.6f}")
    return distance
