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

"""トレースファイルに添付するメタデータ (サイドカー JSON) の構造を定義するモジュール

filename: <trace>.json
"""

from dataclasses import dataclass, field
from typing import Optional

from dataclasses_json import config, dataclass_json


@dataclass_json
@dataclass
class GroundTruth:
    lane_id: int
    lam: float = field(metadata=config(field_name="lambda"))
    c: float


@dataclass_json
@dataclass
class TraceMetadata:
    name: str
    granularity_s: float
    extent_m: list[float]
    lanes: list[int]
    ground_truth: Optional[list[GroundTruth]] = None
