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

"""hcvanet fit サブコマンドモジュール"""

from pathlib import Path
from typing import Optional

from ..fitting import FitMethod, FitResult, fit_all, fit_hc_mle, fit_lsq, fit_mom, fit_ppp_mle
from ..traces import gaps, lane_gaps, parse_trace
from ._common import METHOD_CHOICES, AppContext, fmt, write_fits


ESTIMATORS = {
    FitMethod.PPP_MLE: fit_ppp_mle,
    FitMethod.MOM: fit_mom,
    FitMethod.HC_MLE: fit_hc_mle,
    FitMethod.LSQ2: fit_lsq,
    FitMethod.LSQ1_FIXED_INTENSITY: lambda sample: fit_lsq(sample, fix_intensity=True),
}


def run(
    app: AppContext,
    trace_path: Path,
    method: str,
    snapshot: Optional[int],
    lanes: tuple[int, ...],
    window_margin: float,
    drop_first: int,
    output: Optional[Path],
) -> list[FitResult]:
    """トレースの車線ごとに車間距離分布を推定し、結果を表と JSON で出力する

    ``snapshot`` を省略すると全スナップショットの車間距離をまとめて推定する。
    """

    trace = parse_trace(trace_path, drop_first=drop_first)
    lane_ids = list(lanes) or trace.lane_ids
    results: list[FitResult] = []
    for lane_id in lane_ids:
        if snapshot is None:
            sample = lane_gaps(trace, lane_id, window_margin)
        else:
            sample = gaps(trace, snapshot, lane_id, window_margin)
        if method == "all":
            results.extend(fit_all(sample))
        else:
            results.append(ESTIMATORS[METHOD_CHOICES[method]](sample))

    rows = [
        [
            str(r.lane_id),
            r.method.value,
            fmt(r.lambda_hat, ".5f"),
            fmt(r.c_hat, ".3f"),
            fmt(r.mu_hat, ".5f"),
            fmt(r.rss, ".3g"),
            "clamped" if r.clamped else "",
        ]
        for r in results
    ]
    app.ui.display_columns(rows, ["lane", "method", ">λ̂ [1/m]", ">ĉ [m]", ">μ̂ [1/m]", ">rss", "flag"], title=trace.metadata.name)
    path = write_fits(results, output if output is not None else app.output_dir() / "fits.json")
    app.ui.wrote(path, f"{len(results)} fits of {len(lane_ids)} lanes")
    return results
