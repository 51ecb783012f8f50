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

"""曲線ファイル (JSON 形式) の構造を定義するモジュール

filename: <name>.json
"""

from dataclasses import dataclass
from typing import Optional

from dataclasses_json import LetterCase, dataclass_json


@dataclass_json(letter_case=LetterCase.CAMEL)
@dataclass
class OutageCurveJson:
    provenance: str
    theta_db: list[float]
    p_out: list[float]
    std_error: Optional[list[float]] = None
    manifest: Optional[dict] = None


@dataclass_json(letter_case=LetterCase.CAMEL)
@dataclass
class SummaryCurveJson:
    kind: str
    r_m: list[float]
    values: list[Optional[float]]


@dataclass_json(letter_case=LetterCase.CAMEL)
@dataclass
class EnvelopeJson:
    kind: str
    n_realizations: int
    r_m: list[float]
    lower: list[Optional[float]]
    upper: list[Optional[float]]
