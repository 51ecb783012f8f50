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

"""CLI が利用または参照する設定ファイルの構造を定義するモジュール

filename: config.json

値の優先順位はコマンドラインのフラグ、設定ファイル、既定値の順。
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from dataclasses_json import LetterCase, dataclass_json

from ..constants import GUARD_ZONE_DEFAULTS, MC_ROADWAY_LENGTH, MC_RUNS, THETA_DB_RANGE
from ..errors import ConfigurationError


@dataclass_json(letter_case=LetterCase.CAMEL)
@dataclass
class ConfigSimulation:
    seed: int = 0
    n_runs: int = MC_RUNS
    roadway_length: float = MC_ROADWAY_LENGTH
    jobs: int = 1


@dataclass_json(letter_case=LetterCase.CAMEL)
@dataclass
class ConfigOutage:
    eta: float = 3.0
    xi: float = 0.5
    g: float = 0.01
    ell: float = GUARD_ZONE_DEFAULTS[0]
    phi: float = GUARD_ZONE_DEFAULTS[1]
    theta_db: list[float] = field(default_factory=lambda: list(THETA_DB_RANGE))


@dataclass_json(letter_case=LetterCase.CAMEL)
@dataclass
class ConfigOutput:
    directory: str = "results"
    format: str = "csv"


@dataclass_json(letter_case=LetterCase.CAMEL)
@dataclass
class ConfigJson:
    simulation: ConfigSimulation = field(default_factory=ConfigSimulation)
    outage: ConfigOutage = field(default_factory=ConfigOutage)
    output: ConfigOutput = field(default_factory=ConfigOutput)


def load_config(path: Optional[Path]) -> ConfigJson:
    """Read ``path``; a missing file yields the defaults."""
    if path is None or not path.exists():
        return ConfigJson()
    try:
        return ConfigJson.from_json(path.read_text(encoding="utf-8"))  # type: ignore[attr-defined]
    except (ValueError, KeyError, TypeError) as e:
        raise ConfigurationError(f"{path}: {e}") from e
