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

from pathlib import Path

import pytest
from click.testing import CliRunner

from hardcore_vanet.hardcore import HardcoreLaneModel
from hardcore_vanet.interference import LinkScenario, theta_grid_db


@pytest.fixture
def model() -> HardcoreLaneModel:
    """λ = 0.025 m⁻¹, c = 16 m, hence μ = 1/24."""
    return HardcoreLaneModel.from_intensity(0.025, 16.0)


@pytest.fixture
def poisson() -> HardcoreLaneModel:
    return HardcoreLaneModel.ppp(0.025)


@pytest.fixture
def scenario(model: HardcoreLaneModel) -> LinkScenario:
    return LinkScenario(eta=3.0, xi=0.5, g=0.01, theta_grid=tuple(theta_grid_db()), own_lane_model=model)


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def cli_args(tmp_path: Path) -> list[str]:
    """Global options isolating a CLI run from the user's config and working directory."""
    return ["--config", str(tmp_path / "config.json"), "--output-dir", str(tmp_path / "out")]
