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

import math

import pytest

from hardcore_vanet.models.report import CriterionResult, ReplicationReport
from hardcore_vanet.replication import (
    CRITERIA,
    FULL_MC_RUNS,
    _ks_slack,
    _runs,
    _widen,
    replicate,
    special_functions,
)


def test_run_counts_scale_down_to_a_floor():
    assert _runs(FULL_MC_RUNS, 1.0, 2_000) == FULL_MC_RUNS
    assert _runs(FULL_MC_RUNS, 0.1, 2_000) == 10_000
    assert _runs(FULL_MC_RUNS, 0.001, 2_000) == 2_000


def test_tolerances_widen_with_fewer_runs():
    assert _widen(0.05, FULL_MC_RUNS, FULL_MC_RUNS) == 0.05
    assert _widen(0.05, FULL_MC_RUNS, FULL_MC_RUNS // 4) == pytest.approx(0.1)
    assert _ks_slack(0.03, FULL_MC_RUNS) == pytest.approx(0.03)
    assert _ks_slack(0.03, 2_500) == pytest.approx(0.03 + 1.5 / 50 - 1.5 / math.sqrt(FULL_MC_RUNS))


def test_special_functions_against_quadrature():
    result = special_functions(0.01, 0)
    assert set(result.metrics) == set(result.thresholds)
    assert result.metrics["q_abs_err"] < 1e-10
    assert result.metrics["hyp2f1_abs_err"] <= result.thresholds["hyp2f1_abs_err"]
    assert result.metrics["quarter_pi_abs_err"] <= 1e-12


def test_replicate_selected_checks():
    started = []
    report = replicate(0.01, 0, only=["special"], on_start=started.append)
    assert started == ["special"]
    assert [c.name for c in report.criteria] == ["special functions"]
    assert report.seed == 0 and report.scale == 0.01
    assert report.criteria[0].seconds > 0
    assert "criteria" in report.to_dict()


def test_report_passes_only_when_every_criterion_does():
    ok = CriterionResult("a", True)
    bad = CriterionResult("b", False)
    assert ReplicationReport("0", 0, 0.01, [ok]).passed
    assert not ReplicationReport("0", 0, 0.01, [ok, bad]).passed


def test_criteria_keys():
    assert list(CRITERIA) == [
        "summary", "moments", "ppp", "own-lane", "other-lane", "multilane", "estimators", "special", "invariants",
    ]


@pytest.mark.slow
@pytest.mark.parametrize("key", [k for k in CRITERIA if k not in ("special", "invariants")])
def test_acceptance_at_reduced_scale(key):
    result = CRITERIA[key](0.1, 0)
    assert result.passed, (result.metrics, result.thresholds, result.detail)
