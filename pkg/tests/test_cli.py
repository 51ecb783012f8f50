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
from pathlib import Path

import numpy as np
import pytest

from hardcore_vanet import __version__
from hardcore_vanet.constants import DEFAULT_DROP_FIRST
from hardcore_vanet.core import cli
from hardcore_vanet.export import read_outage_curve
from hardcore_vanet.hardcore import HardcoreLaneModel
from hardcore_vanet.interference import LinkScenario, OutageProvenance, outage_own_lane_hc, theta_grid_db

THETA = "-10:20:7"


def invoke(runner, cli_args, *args):
    return runner.invoke(cli, [*cli_args, *args])


@pytest.fixture
def out(tmp_path: Path) -> Path:
    return tmp_path / "out"


@pytest.fixture
def trace(runner, cli_args, out) -> Path:
    result = invoke(
        runner, cli_args, "gen-traces", "--lanes", "0.025:8,0.02:12", "--snapshots", "3", "--length-km", "1", "--seed", "1"
    )
    assert result.exit_code == 0, result.output
    return out / "synthetic.csv"


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_gen_traces_writes_metadata(trace):
    assert trace.exists()
    meta = json.loads(trace.with_suffix(".json").read_text(encoding="utf-8"))
    assert meta["lanes"] == [0, 1]
    assert meta["ground_truth"][0]["lambda"] == 0.025


@pytest.mark.parametrize("quiet, status_shown", [([], True), (["-q"], False)])
def test_status_lines_follow_verbosity(runner, cli_args, out, quiet, status_shown):
    result = invoke(
        runner, [*quiet, *cli_args], "gen-traces", "--lanes", "0.025:8", "--snapshots", "1", "--length-km", "1"
    )
    assert result.exit_code == 0, result.output
    assert ("STATUS:" in result.output) is status_shown
    assert "wrote" in result.output


def test_fit_all_estimators(runner, cli_args, trace, out):
    result = invoke(runner, cli_args, "fit", str(trace), "--drop-first", "0")
    assert result.exit_code == 0, result.output
    docs = json.loads((out / "fits.json").read_text(encoding="utf-8"))
    assert len(docs) == 10
    assert {d["method"] for d in docs} == {"PPP_MLE", "MOM", "HC_MLE", "LSQ2", "LSQ1_FIXED_INTENSITY"}


def test_fit_single_snapshot_and_method(runner, cli_args, trace, tmp_path):
    target = tmp_path / "one.json"
    result = invoke(
        runner, cli_args, "fit", str(trace), "--drop-first", "0", "--snapshot", "2", "--lane", "1",
        "--method", "mle", "--output", str(target),
    )
    assert result.exit_code == 0, result.output
    docs = json.loads(target.read_text(encoding="utf-8"))
    assert [(d["lane_id"], d["method"]) for d in docs] == [(1, "HC_MLE")]
    assert docs[0]["c_hat"] >= 12.0


def test_outage_from_lanes_matches_library(runner, cli_args, out):
    result = invoke(runner, cli_args, "outage", "--lanes", "0.025:16", "--theta-db", THETA)
    assert result.exit_code == 0, result.output
    written = read_outage_curve(out / "outage_hardcore.csv")
    model = HardcoreLaneModel.from_intensity(0.025, 16.0)
    scenario = LinkScenario(eta=3.0, xi=0.5, g=0.01, theta_grid=tuple(theta_grid_db(-10, 20, 7)), own_lane_model=model)
    np.testing.assert_allclose(written.p_out, outage_own_lane_hc(model, scenario).p_out, rtol=1e-12)
    ppp = read_outage_curve(out / "outage_ppp.csv", OutageProvenance.PPP_ANALYTIC)
    assert ppp.p_out.shape == (7,)


def test_outage_from_fits(runner, cli_args, trace, out):
    assert invoke(runner, cli_args, "fit", str(trace), "--drop-first", "0").exit_code == 0
    result = invoke(
        runner, cli_args, "outage", "--fits", str(out / "fits.json"), "--link-lane", "1", "--theta-db", THETA,
        "--format", "json",
    )
    assert result.exit_code == 0, result.output
    doc = json.loads((out / "outage_hardcore.json").read_text(encoding="utf-8"))
    assert doc["provenance"] == "HC_ANALYTIC"
    assert len(doc["pOut"]) == 7


def test_simulate_and_compare(runner, cli_args, out):
    result = invoke(runner, cli_args, "simulate", "--lanes", "0.025:16", "--runs", "500", "--seed", "3", "--theta-db", THETA)
    assert result.exit_code == 0, result.output
    curve = read_outage_curve(out / "outage_mc.csv")
    assert curve.provenance is OutageProvenance.MONTE_CARLO
    manifest = json.loads((out / "outage_mc.manifest.json").read_text(encoding="utf-8"))
    assert manifest["seed"] == 3
    assert manifest["nRuns"] == 500

    assert invoke(runner, cli_args, "outage", "--lanes", "0.025:16", "--theta-db", THETA).exit_code == 0
    result = invoke(runner, cli_args, "gof", str(out / "outage_mc.csv"), str(out / "outage_hardcore.csv"))
    assert result.exit_code == 0, result.output
    assert "KS(outage_mc.csv, outage_hardcore.csv)" in result.output


def test_simulate_from_trace(runner, cli_args, trace, out):
    result = invoke(
        runner, cli_args, "simulate", "--trace", str(trace), "--drop-first", "0", "--link-lane", "0", "--runs", "300",
        "--theta-db", THETA,
    )
    assert result.exit_code == 0, result.output
    manifest = json.loads((out / "outage_mc.manifest.json").read_text(encoding="utf-8"))
    assert manifest["source"] == "TRACE"


def test_gof_of_identical_curves(runner, cli_args, out):
    assert invoke(runner, cli_args, "outage", "--lanes", "0.025:16", "--theta-db", THETA, "--no-ppp").exit_code == 0
    assert not (out / "outage_ppp.csv").exists()
    curve = str(out / "outage_hardcore.csv")
    result = invoke(runner, cli_args, "gof", curve, curve)
    assert result.exit_code == 0
    assert "= 0.000000" in result.output


def test_stats_closed_form(runner, cli_args, out):
    result = invoke(runner, cli_args, "stats", "--model", "0.025:16", "--statistic", "J", "--r-max", "20")
    assert result.exit_code == 0, result.output
    rows = (out / "J_model.csv").read_text(encoding="utf-8").splitlines()
    assert rows[0] == "r_m,J"
    r, j = rows[6].split(",")
    assert float(r) == 5.0
    assert float(j) == pytest.approx(4.0 / 3.0)


def test_stats_from_trace_with_envelope(runner, cli_args, trace, out):
    result = invoke(
        runner, cli_args, "stats", "--trace", str(trace), "--drop-first", "0", "--statistic", "L", "--r-max", "50",
        "--envelope", "3",
    )
    assert result.exit_code == 0, result.output
    assert (out / "L_empirical.csv").exists()
    assert (out / "L_envelope.csv").read_text(encoding="utf-8").startswith("r_m,lower,upper")


@pytest.mark.parametrize("command", ["fit", "stats", "simulate"])
def test_trace_commands_share_the_warm_up_default(command):
    params = {p.name: p for p in cli.commands[command].params}
    assert params["drop_first"].default == DEFAULT_DROP_FIRST


@pytest.mark.parametrize(
    "args",
    [
        ["fit", "{trace}"],
        ["stats", "--trace", "{trace}", "--statistic", "L", "--r-max", "50"],
        ["simulate", "--trace", "{trace}", "--link-lane", "0", "--runs", "100"],
    ],
)
def test_short_trace_has_no_snapshots_after_warm_up(runner, cli_args, trace, args):
    result = invoke(runner, cli_args, *(a.format(trace=trace) for a in args))
    assert result.exit_code == 1
    assert f"dropping {DEFAULT_DROP_FIRST} snapshots leaves none" in result.output


def test_config_file_sets_defaults(runner, tmp_path, out):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"outage": {"thetaDb": [0, 10, 3]}, "output": {"format": "json"}}), encoding="utf-8")
    result = runner.invoke(cli, ["--config", str(config), "-o", str(out), "outage", "--lanes", "0.025:16", "--no-ppp"])
    assert result.exit_code == 0, result.output
    doc = json.loads((out / "outage_hardcore.json").read_text(encoding="utf-8"))
    assert doc["thetaDb"] == pytest.approx([0.0, 5.0, 10.0])


@pytest.mark.parametrize(
    "args",
    [
        ["outage", "--lanes", "0.1:12"],
        ["outage"],
        ["outage", "--lanes", "0.025:16,0.02:8"],
        ["outage", "--lanes", "0.025:16", "--theta-db", "1:2"],
        ["outage", "--lanes", "0.025:16", "--eta", "0.5"],
        ["simulate", "--lanes", "0.025:16", "--runs", "10", "--roadway-km", "0.2"],
    ],
)
def test_bad_input_exits_with_one(runner, cli_args, args):
    result = invoke(runner, cli_args, *args)
    assert result.exit_code == 1
    assert "ERROR" in result.output


def test_single_gap_lane_is_bad_input(runner, cli_args, tmp_path):
    path = tmp_path / "short.csv"
    path.write_text("snapshot_id,lane_id,position_m\n0,0,10.0\n0,0,30.0\n", encoding="utf-8")
    result = invoke(runner, cli_args, "fit", str(path), "--drop-first", "0", "--method", "mle")
    assert result.exit_code == 1
    assert "at least two are needed" in result.output


def test_broken_config(runner, tmp_path):
    config = tmp_path / "config.json"
    config.write_text("{not json", encoding="utf-8")
    result = runner.invoke(cli, ["--config", str(config), "outage", "--lanes", "0.025:16"])
    assert result.exit_code == 1


def test_doctor_reports_broken_config(runner, tmp_path):
    config = tmp_path / "config.json"
    config.write_text("{not json", encoding="utf-8")
    result = runner.invoke(cli, ["--config", str(config), "-o", str(tmp_path / "out"), "doctor"])
    assert result.exit_code == 1


def test_replicate_invariants(runner, cli_args, out):
    result = invoke(runner, cli_args, "replicate-paper", "--only", "invariants", "--seed", "0")
    assert result.exit_code == 0, result.output
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert [c["name"] for c in report["criteria"]] == ["structural invariants"]
    assert report["criteria"][0]["passed"] is True
