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

"""サブコマンド間で共有する実行コンテキストとオプションの解釈を定義するモジュール"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, TypeVar

import numpy as np

from ..errors import ConfigurationError
from ..export import OutputFormat
from ..fitting import FitMethod, FitResult
from ..hardcore import HardcoreLaneModel
from ..interference import LinkScenario, theta_grid_db
from ..models.config import ConfigJson
from ..termui import UI


T = TypeVar("T")

METHOD_CHOICES: dict[str, FitMethod] = {
    "ppp": FitMethod.PPP_MLE,
    "mom": FitMethod.MOM,
    "mle": FitMethod.HC_MLE,
    "lsq": FitMethod.LSQ2,
    "lsq-fixed": FitMethod.LSQ1_FIXED_INTENSITY,
}


@dataclass
class AppContext:
    ui: UI
    config: ConfigJson
    debug: bool = False
    config_path: Optional[Path] = None

    def output_dir(self, override: Optional[Path] = None) -> Path:
        """Resolved output directory, created on demand; it must be writable."""
        directory = Path(override) if override is not None else Path(self.config.output.directory)
        directory.mkdir(parents=True, exist_ok=True)
        if not os.access(directory, os.W_OK):
            raise ConfigurationError(f"output directory {directory} is not writable")
        return directory

    def output_format(self, override: Optional[str] = None) -> OutputFormat:
        try:
            return OutputFormat(pick(override, self.config.output.format))
        except ValueError:
            raise ConfigurationError(f"unknown output format {override or self.config.output.format!r}") from None


def pick(flag: Optional[T], configured: T) -> T:
    """An explicit flag wins over the configured value."""
    return configured if flag is None else flag


def parse_lane(text: str) -> HardcoreLaneModel:
    """``λ:c`` in m⁻¹ and meters; c = 0 gives a PPP lane."""
    try:
        lam_text, c_text = text.split(":")
        lam, c = float(lam_text), float(c_text)
    except ValueError:
        raise ConfigurationError(f"lane {text!r} is not of the form lambda:c") from None
    return HardcoreLaneModel.ppp(lam) if c == 0 else HardcoreLaneModel.from_intensity(lam, c)


def parse_lanes(text: str) -> list[HardcoreLaneModel]:
    lanes = [parse_lane(part.strip()) for part in text.split(",") if part.strip()]
    if not lanes:
        raise ConfigurationError("at least one lane is required")
    return lanes


def parse_theta_db(text: Optional[str], configured: list[float]) -> np.ndarray:
    """``lo:hi:n`` in dB, converted to linear thresholds."""
    if text is None:
        lo, hi, n = configured
    else:
        try:
            lo_text, hi_text, n_text = text.split(":")
            lo, hi, n = float(lo_text), float(hi_text), int(n_text)
        except ValueError:
            raise ConfigurationError(f"threshold grid {text!r} is not of the form lo:hi:n") from None
    return theta_grid_db(float(lo), float(hi), int(n))


def resolve_link_lane(link_lane: Optional[int], n_lanes: int) -> int:
    if link_lane is not None:
        return link_lane
    if n_lanes == 1:
        return 0
    raise ConfigurationError(f"{n_lanes} lanes given; designate the link lane with --link-lane")


def build_scenario(
    app: AppContext,
    lanes: list[HardcoreLaneModel],
    link_lane: int,
    eta: Optional[float],
    xi: Optional[float],
    g: Optional[float],
    ell: Optional[float],
    phi: Optional[float],
    theta_db: Optional[str],
) -> tuple[LinkScenario, float]:
    """Scenario with every lane placed around the link lane, and the lane spacing used."""
    outage = app.config.outage
    spacing = pick(ell, outage.ell)
    base = LinkScenario(
        eta=pick(eta, outage.eta),
        xi=pick(xi, outage.xi),
        g=pick(g, outage.g),
        theta_grid=tuple(parse_theta_db(theta_db, outage.theta_db)),
        own_lane_model=lanes[0],
        phi=pick(phi, outage.phi),
    )
    return base.with_lanes(lanes, link_lane, spacing), spacing


def read_fits(path: Path) -> list[FitResult]:
    try:
        docs = json.loads(path.read_text(encoding="utf-8"))
        return [FitResult.from_dict(d) for d in docs]  # type: ignore[attr-defined]
    except (ValueError, KeyError, TypeError) as e:
        raise ConfigurationError(f"{path} is not a fit result file: {e}") from e


def write_fits(results: list[FitResult], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    docs = [r.to_dict(encode_json=True) for r in results]  # type: ignore[attr-defined]
    path.write_text(json.dumps(docs, indent=2, ensure_ascii=False), encoding="utf-8")
    return path


def lanes_from_fits(results: list[FitResult], method: FitMethod) -> list[HardcoreLaneModel]:
    chosen = sorted((r for r in results if r.method == method), key=lambda r: r.lane_id)
    if not chosen:
        raise ConfigurationError(f"no {method.value} fits in the fit file")
    return [r.to_model() for r in chosen]


def fmt(value: Optional[float], spec: str = ".4g") -> str:
    return "-" if value is None else format(value, spec)
