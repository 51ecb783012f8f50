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

import json

import numpy as np
import pytest

from hardcore_vanet.errors import TraceFormatError
from hardcore_vanet.export import (
    OutputFormat,
    read_outage_curve,
    write_envelope,
    write_outage_curve,
    write_summary_curve,
)
from hardcore_vanet.hardcore import SummaryCurve, SummaryKind
from hardcore_vanet.interference import OutageCurve, OutageProvenance
from hardcore_vanet.models.manifest import RunManifest
from hardcore_vanet.spatial_stats import Envelope


@pytest.fixture
def analytic() -> OutageCurve:
    return OutageCurve(np.array([0.1, 1.0, 10.0]), np.array([0.01, 0.2, 0.7]), OutageProvenance.HC_ANALYTIC)


@pytest.fixture
def simulated() -> OutageCurve:
    return OutageCurve(
        np.array([0.1, 1.0, 10.0]),
        np.array([0.0, 0.25, 0.75]),
        OutageProvenance.MONTE_CARLO,
        np.array([0.0, 0.01, 0.01]),
    )


@pytest.fixture
def manifest() -> RunManifest:
    return RunManifest(
        seed=3,
        n_runs=1000,
        chunk_size=500,
        roadway_length=10_000.0,
        source="MODEL",
        scenario_hash="ab" * 32,
        version="0.1.0",
        created_at="2025-01-01T00:00:00+00:00",
    )


class TestOutageCurveFiles:
    def test_csv_columns(self, analytic, tmp_path):
        path = write_outage_curve(analytic, tmp_path / "outage_hc")
        assert path.name == "outage_hc.csv"
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "theta_db,p_out"
        assert lines[2] == "0.0,0.2"

    def test_csv_reads_back(self, analytic, tmp_path):
        back = read_outage_curve(write_outage_curve(analytic, tmp_path / "c.csv"))
        np.testing.assert_allclose(back.theta_grid, analytic.theta_grid)
        np.testing.assert_array_equal(back.p_out, analytic.p_out)
        assert back.provenance is OutageProvenance.HC_ANALYTIC
        assert back.std_error is None

    def test_csv_provenance_override(self, analytic, tmp_path):
        back = read_outage_curve(write_outage_curve(analytic, tmp_path / "c.csv"), OutageProvenance.PPP_ANALYTIC)
        assert back.provenance is OutageProvenance.PPP_ANALYTIC

    def test_simulated_csv_has_error_column_and_manifest(self, simulated, manifest, tmp_path):
        path = write_outage_curve(simulated, tmp_path / "outage_mc.csv", manifest=manifest)
        assert path.read_text(encoding="utf-8").splitlines()[0] == "theta_db,p_out,std_error"
        sidecar = json.loads((tmp_path / "outage_mc.manifest.json").read_text(encoding="utf-8"))
        assert sidecar["nRuns"] == 1000
        assert sidecar["scenarioHash"] == "ab" * 32
        back = read_outage_curve(path)
        assert back.provenance is OutageProvenance.MONTE_CARLO
        np.testing.assert_array_equal(back.std_error, simulated.std_error)

    def test_json_embeds_manifest(self, simulated, manifest, tmp_path):
        path = write_outage_curve(simulated, tmp_path / "outage_mc", OutputFormat.JSON, manifest)
        assert path.suffix == ".json"
        doc = json.loads(path.read_text(encoding="utf-8"))
        assert doc["provenance"] == "MONTE_CARLO"
        assert doc["manifest"]["seed"] == 3
        assert "stdError" in doc
        back = read_outage_curve(path)
        assert back.provenance is OutageProvenance.MONTE_CARLO
        np.testing.assert_array_equal(back.p_out, simulated.p_out)

    def test_not_an_outage_file(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("r_m,J\n0,1\n", encoding="utf-8")
        with pytest.raises(TraceFormatError):
            read_outage_curve(path)

    def test_no_rows(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("theta_db,p_out\n", encoding="utf-8")
        with pytest.raises(TraceFormatError):
            read_outage_curve(path)


class TestSummaryFiles:
    def test_curve_csv(self, tmp_path):
        curve = SummaryCurve(np.array([0.0, 1.0]), np.array([1.0, 1.5]), SummaryKind.J)
        lines = write_summary_curve(curve, tmp_path / "j").read_text(encoding="utf-8").splitlines()
        assert lines == ["r_m,J", "0.0,1.0", "1.0,1.5"]

    def test_curve_json_writes_null_for_nan(self, tmp_path):
        curve = SummaryCurve(np.array([0.0, 1.0]), np.array([1.0, np.nan]), SummaryKind.J)
        doc = json.loads(write_summary_curve(curve, tmp_path / "j", OutputFormat.JSON).read_text(encoding="utf-8"))
        assert doc == {"kind": "J", "rM": [0.0, 1.0], "values": [1.0, None]}

    def test_envelope(self, tmp_path):
        band = Envelope(np.array([0.0, 5.0]), np.array([0.0, 4.0]), np.array([0.0, 6.0]), 10, SummaryKind.L)
        lines = write_envelope(band, tmp_path / "env.csv").read_text(encoding="utf-8").splitlines()
        assert lines == ["r_m,lower,upper", "0.0,0.0,0.0", "5.0,4.0,6.0"]
        doc = json.loads(write_envelope(band, tmp_path / "env", OutputFormat.JSON).read_text(encoding="utf-8"))
        assert doc["nRealizations"] == 10
