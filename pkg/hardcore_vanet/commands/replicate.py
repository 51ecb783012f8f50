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

"""hcvanet replicate-paper サブコマンドモジュール"""

from pathlib import Path
from typing import Optional

from ..models.report import ReplicationReport
from ..replication import CRITERIA, replicate
from ..status import ExitStatus
from ._common import AppContext, pick


def run(
    app: AppContext,
    scale: float,
    seed: Optional[int],
    only: tuple[str, ...],
    output: Optional[Path],
) -> ExitStatus:
    """縮小規模の再現スイートを実行し、report.json と結果の表を出力する"""

    seed = pick(seed, app.config.simulation.seed)
    selected = list(only) or list(CRITERIA)
    with app.ui.make_progress() as progress:
        task = progress.add_task("replicating", total=len(selected))

        def advance(key: str) -> None:
            progress.update(task, description=key, completed=selected.index(key))

        report: ReplicationReport = replicate(scale, seed, selected, on_start=advance)
        progress.update(task, completed=len(selected))

    rows = [
        [
            c.name,
            app.ui.verdict(c.passed)[0],
            ", ".join(f"{k}={v:.3g}" for k, v in c.metrics.items()),
            ", ".join(f"{k}≤{v:.3g}" for k, v in c.thresholds.items()),
            f"{c.seconds:.1f}",
        ]
        for c in report.criteria
    ]
    app.ui.display_columns(rows, ["criterion", "^result", "metrics", "thresholds", ">seconds"], title=f"scale {scale}, seed {seed}")
    path = output if output is not None else app.output_dir() / "report.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.to_json(indent=2, ensure_ascii=False), encoding="utf-8")  # type: ignore[attr-defined]
    app.ui.wrote(path)
    return ExitStatus.SUCCESS if report.passed else ExitStatus.ERROR_NUMERIC
