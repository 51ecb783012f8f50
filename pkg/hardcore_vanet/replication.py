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

"""モデル・推定・干渉解析の主要な結果を縮小規模で再現し、検証するスイートを定義するモジュール

各検証は試行回数を ``scale`` 倍に縮小して実行する。統計的な許容誤差は試行回数に合わせて
広げる: 相対誤差は √(本来の回数 / 実際の回数) 倍、KS 距離は二項標準誤差 3 つ分を加算する。
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable
from dataclasses import replace

import numpy as np
from scipy import integrate, special

from . import __version__
from .fitting import GapSample, fit_hc_mle, fit_lsq, fit_mom, fit_ppp_mle
from .hardcore import HardcoreLaneModel, j_function, l_function
from .interference import (
    LinkScenario,
    OtherLane,
    OutageCurve,
    guard_zone,
    multilane_scenario,
    outage_multilane_hc,
    outage_multilane_ppp,
    outage_other_lane_hc,
    outage_other_lane_ppp,
    outage_own_lane_hc,
    outage_own_lane_ppp,
    outage_own_lane_ppp_integral,
    palm_moments_behind,
    shifted_gamma_from_moments,
    theta_grid_db,
)
from .models.report import CriterionResult, ReplicationReport
from .montecarlo import McConfig, McSource, simulate_interference_moments, simulate_outage, simulate_sir
from .sampling import ModelGapLaw, RngSeed, sample_hardcore_lane
from .spatial_stats import Window, empirical_j, empirical_l, ks_distance
from .special import hyp2f1_guardzone, hyp2f1_outage, regularized_upper_gamma
from .traces import empirical_cdf, generate_synthetic_trace, lane_gaps


logger = logging.getLogger(__name__)

LAM, C, ETA, XI, G = 0.025, 16.0, 3.0, 0.5, 0.01
ROADWAY = (0.0, 10_000.0)
FULL_MC_RUNS = 100_000


def _runs(full: int, scale: float, minimum: int) -> int:
    return max(minimum, int(round(full * scale)))


def _widen(threshold: float, full: int, n: int) -> float:
    return threshold * max(1.0, math.sqrt(full / n))


def _ks_slack(threshold: float, n: int) -> float:
    return threshold + max(0.0, 1.5 / math.sqrt(n) - 1.5 / math.sqrt(FULL_MC_RUNS))


def _scenario(model: HardcoreLaneModel, **kwargs: object) -> LinkScenario:
    values: dict = dict(eta=ETA, xi=XI, g=G, theta_grid=tuple(theta_grid_db()), own_lane_model=model)
    values.update(kwargs)
    return LinkScenario(**values)


def summary_statistics(scale: float, seed: int) -> CriterionResult:
    """Mean Ĵ and L̂ over simulated lanes against the closed forms."""
    full = 10_000
    n = _runs(full, scale, 20)
    model = HardcoreLaneModel.from_intensity(LAM, C)
    j_r, l_r = np.array([5.0, 12.0, 40.0]), np.array([20.0, 50.0, 200.0])
    j_window, l_window = Window(*ROADWAY, 40.0), Window(*ROADWAY, 200.0)
    base = RngSeed(seed)
    j_values, l_values = [], []
    for i in range(n):
        snapshot = sample_hardcore_lane(model, ROADWAY, base.substream(i))
        j_values.append(empirical_j(snapshot, j_window, j_r, seed=RngSeed(seed + 1, i)).values)
        l_values.append(empirical_l(snapshot, l_window, l_r).values)
    j_err = float(np.max(np.abs(np.nanmean(j_values, axis=0) / j_function(model, j_r) - 1.0)))
    l_err = float(np.max(np.abs(np.mean(l_values, axis=0) / l_function(model, l_r) - 1.0)))
    thresholds = {"j_rel_err": _widen(0.02, full, n), "l_rel_err": _widen(0.01, full, n)}
    metrics = {"j_rel_err": j_err, "l_rel_err": l_err, "runs": float(n)}
    return CriterionResult(
        "summary statistics",
        j_err <= thresholds["j_rel_err"] and l_err <= thresholds["l_rel_err"],
        metrics,
        thresholds,
    )


def interference_moments(scale: float, seed: int) -> CriterionResult:
    """Palm moments behind the transmitter against direct sampling for λc up to 0.5."""
    n = _runs(FULL_MC_RUNS, scale, 2_000)
    d = 40.0
    worst = {"mean_rel_err": 0.0, "std_rel_err": 0.0, "skew_rel_err": 0.0}
    for k, c in enumerate((0.0, 4.0, 8.0, 12.0, 16.0, 20.0)):
        model = HardcoreLaneModel.from_intensity(LAM, c)
        scenario = _scenario(model)
        analytic = palm_moments_behind(model, scenario, d)
        simulated = simulate_interference_moments(McConfig(n_runs=n, seed=seed + k), scenario, d)
        worst["mean_rel_err"] = max(worst["mean_rel_err"], abs(simulated.mean / analytic.mean - 1.0))
        worst["std_rel_err"] = max(worst["std_rel_err"], abs(simulated.std / analytic.std - 1.0))
        worst["skew_rel_err"] = max(worst["skew_rel_err"], abs(simulated.skewness / analytic.skewness - 1.0))
    thresholds = {
        "mean_rel_err": _widen(0.05, FULL_MC_RUNS, n),
        "std_rel_err": _widen(0.05, FULL_MC_RUNS, n),
        "skew_rel_err": _widen(0.10, FULL_MC_RUNS, n),
    }
    return CriterionResult(
        "interference moments",
        all(worst[key] <= thresholds[key] for key in worst),
        {**worst, "runs": float(n)},
        thresholds,
    )


def ppp_exactness(scale: float, seed: int) -> CriterionResult:
    """Closed-form PPP outage against its integral form and against simulation."""
    theta = np.logspace(-2, 2, 9)
    gap = 0.0
    for eta in (2.0, 3.0, 4.0):
        scenario = _scenario(HardcoreLaneModel.ppp(LAM), eta=eta, theta_grid=tuple(theta))
        closed = outage_own_lane_ppp(scenario).p_out
        numeric = outage_own_lane_ppp_integral(LAM, scenario).p_out
        gap = max(gap, float(np.max(np.abs(closed - numeric))))
    n = _runs(FULL_MC_RUNS, scale, 2_000)
    scenario = _scenario(HardcoreLaneModel.ppp(LAM))
    ks = ks_distance(outage_own_lane_ppp(scenario), simulate_outage(McConfig(n_runs=n, seed=seed), scenario))
    thresholds = {"closed_vs_integral": 1e-6, "ks_mc": _ks_slack(0.01, n)}
    return CriterionResult(
        "PPP exactness",
        gap <= thresholds["closed_vs_integral"] and ks <= thresholds["ks_mc"],
        {"closed_vs_integral": gap, "ks_mc": ks, "runs": float(n)},
        thresholds,
    )


def own_lane_outage(scale: float, seed: int) -> CriterionResult:
    """Hardcore own-lane outage against simulation, and against the PPP prediction."""
    n = _runs(FULL_MC_RUNS, scale, 2_000)
    model = HardcoreLaneModel.from_intensity(LAM, C)
    scenario = _scenario(model)
    simulated = simulate_outage(McConfig(n_runs=n, seed=seed), scenario)
    ks_hc = ks_distance(outage_own_lane_hc(model, scenario), simulated)
    ks_ppp = ks_distance(outage_own_lane_ppp(scenario), simulated)
    thresholds = {"ks_hardcore": _ks_slack(0.03, n)}
    return CriterionResult(
        "own-lane outage",
        ks_hc <= thresholds["ks_hardcore"] and ks_hc < ks_ppp,
        {"ks_hardcore": ks_hc, "ks_ppp": ks_ppp, "runs": float(n)},
        thresholds,
    )


def other_lane_outage(scale: float, seed: int, ell: float = 6.0) -> CriterionResult:
    """Outage caused by one parallel lane beyond the guard zone, hardcore and PPP sources."""
    n = _runs(FULL_MC_RUNS, scale, 2_000)
    model = HardcoreLaneModel.from_intensity(LAM, C)
    scenario = _scenario(model, other_lanes=(OtherLane(model, ell),))
    r0 = guard_zone(ell, scenario.phi)
    simulated = simulate_outage(McConfig(n_runs=n, seed=seed, own_lane_interference=False), scenario)
    ks_hc = ks_distance(outage_other_lane_hc(model, scenario, r0), simulated)

    poisson = HardcoreLaneModel.ppp(LAM)
    ppp_scenario = _scenario(poisson, other_lanes=(OtherLane(poisson, ell),))
    ppp_simulated = simulate_outage(McConfig(n_runs=n, seed=seed + 1, own_lane_interference=False), ppp_scenario)
    ks_ppp = ks_distance(outage_other_lane_ppp(LAM, ppp_scenario, r0), ppp_simulated)
    thresholds = {"ks_hardcore": _ks_slack(0.03, n), "ks_ppp": _ks_slack(0.02, n)}
    return CriterionResult(
        "other-lane outage",
        ks_hc <= thresholds["ks_hardcore"] and ks_ppp <= thresholds["ks_ppp"],
        {"ks_hardcore": ks_hc, "ks_ppp": ks_ppp, "r0": r0, "runs": float(n)},
        thresholds,
    )


MULTILANE_TRUTH = ((0.0248, 7.10), (0.0218, 11.05), (0.0205, 14.82))


def multilane_end_to_end(scale: float, seed: int) -> CriterionResult:
    """Synthetic three-lane trace, fitted per lane, predicted and simulated from its gaps."""
    n = _runs(FULL_MC_RUNS, scale, 2_000)
    n_snapshots = _runs(1_200, scale, 20)
    link = 1
    models = [HardcoreLaneModel.from_intensity(lam, c) for lam, c in MULTILANE_TRUTH]
    trace = generate_synthetic_trace(models, n_snapshots, ROADWAY, seed)
    samples = [lane_gaps(trace, lane_id) for lane_id in trace.lane_ids]
    hardcore_fits = [fit_lsq(s) for s in samples]
    ppp_fits = [fit_ppp_mle(s) for s in samples]

    phi = math.pi / 20
    spacing = 50.0 * math.tan(phi / 2)
    base = _scenario(hardcore_fits[link].to_model(), phi=phi)
    predicted = outage_multilane_hc(hardcore_fits, base, link, spacing)
    predicted_ppp = outage_multilane_ppp(ppp_fits, base, link, spacing)
    steeper = outage_multilane_hc(hardcore_fits, replace(base, eta=4.0), link, spacing)

    cdfs = [empirical_cdf(s) for s in samples]
    laws = (cdfs[link], *(cdf for i, cdf in enumerate(cdfs) if i != link))
    config = McConfig(n_runs=n, seed=seed, source=McSource.TRACE, trace_laws=laws)
    simulated = simulate_outage(config, multilane_scenario(hardcore_fits, base, link, spacing))

    ks_hc = ks_distance(predicted, simulated)
    ks_ppp = ks_distance(predicted_ppp, simulated)
    decreases = bool(np.all(steeper.p_out <= predicted.p_out + 1e-9))
    thresholds = {"ks_hardcore": _ks_slack(0.05, n)}
    return CriterionResult(
        "multi-lane end to end",
        ks_hc <= thresholds["ks_hardcore"] and ks_hc < ks_ppp and decreases,
        {"ks_hardcore": ks_hc, "ks_ppp": ks_ppp, "runs": float(n), "snapshots": float(n_snapshots)},
        thresholds,
        detail="" if decreases else "outage did not decrease everywhere when η went from 3 to 4",
    )


def estimator_recovery(scale: float, seed: int, n_gaps: int = 250) -> CriterionResult:
    """Least squares, MLE and MoM on independent synthetic lanes with λc = 0.3."""
    n_lanes = _runs(100, scale, 10)
    model = HardcoreLaneModel.from_intensity(LAM, 0.3 / LAM)
    law = ModelGapLaw(model)
    recovered = 0
    mle_upward = True
    mom_flagged = 0
    for i in range(n_lanes):
        sample = GapSample(law.draw(RngSeed(seed, i).generator(), n_gaps), lane_id=i)
        lsq = fit_lsq(sample)
        assert lsq.c_hat is not None
        if abs(lsq.c_hat / model.c - 1.0) <= 0.10 and abs(lsq.lambda_hat / model.lam - 1.0) <= 0.05:
            recovered += 1
        mle = fit_hc_mle(sample)
        mle_upward &= mle.c_hat is not None and mle.c_hat >= model.c
        mom_flagged += int(fit_mom(sample).clamped)
    share = recovered / n_lanes
    return CriterionResult(
        "estimator recovery",
        share >= 0.95 and mle_upward,
        {"lsq_recovered_share": share, "mom_flagged": float(mom_flagged), "lanes": float(n_lanes)},
        {"lsq_recovered_share": 0.95},
        detail="" if mle_upward else "an MLE hardcore estimate fell below the true value",
    )


def _euler_hyp2f1(b: float, z: float) -> float:
    """₂F₁(1, b; b + 1; −z) = b ∫₀¹ t^{b−1} / (1 + zt) dt."""
    value, _ = integrate.quad(lambda t: 1.0 / (1.0 + z * t), 0.0, 1.0, weight="alg", wvar=(b - 1.0, 0.0), epsabs=1e-14, epsrel=1e-13)
    return b * value


def special_functions(scale: float, seed: int) -> CriterionResult:
    """Incomplete gamma and both hypergeometric families against quadrature oracles."""
    q_err = 0.0
    for k in range(1, 31):
        for x in np.linspace(0.0, 50.0, 11):
            # the tail beyond x + 250 is below 1e-60
            oracle, _ = integrate.quad(
                lambda t: math.exp((k - 1) * math.log(t) - t - special.gammaln(k)) if t > 0 else float(k == 1),
                x,
                x + 250.0,
                points=[k - 1.0] if x < k - 1.0 else None,
                epsabs=1e-15,
                epsrel=1e-13,
                limit=400,
            )
            q_err = max(q_err, abs(float(regularized_upper_gamma(k, x)) - oracle))
    f_err = 0.0
    for eta in (2.0, 3.0, 4.0):
        for z in np.logspace(-2, 2, 9):
            f_err = max(f_err, abs(float(hyp2f1_outage(eta, z)) - _euler_hyp2f1(1.0 - 1.0 / eta, z)))
            f_err = max(f_err, abs(float(hyp2f1_guardzone(eta, z)) - _euler_hyp2f1(1.0 / eta, z)))
    quarter_pi = abs(float(hyp2f1_guardzone(2.0, 1.0)) - math.pi / 4)
    thresholds = {"q_abs_err": 1e-12, "hyp2f1_abs_err": 1e-8, "quarter_pi_abs_err": 1e-12}
    metrics = {"q_abs_err": q_err, "hyp2f1_abs_err": f_err, "quarter_pi_abs_err": quarter_pi}
    return CriterionResult("special functions", all(metrics[k] <= thresholds[k] for k in metrics), metrics, thresholds)


def _monotone_and_bounded(curve: OutageCurve) -> bool:
    p = curve.p_out
    return bool(np.all(p >= 0) and np.all(p <= 1) and np.all(np.diff(p) >= -1e-9))


def structural_invariants(scale: float, seed: int) -> CriterionResult:
    """Monotone outage curves, J ≥ 1 and L ≤ r, exact moment round trips, reproducible seeds."""
    failures = []
    r = np.linspace(0.0, 300.0, 301)
    for lam, c in ((0.025, 16.0), (0.01, 50.0), (0.05, 1.0)):
        model = HardcoreLaneModel.from_intensity(lam, c)
        if np.any(np.asarray(j_function(model, r[r < 1.0 / lam])) < 1.0 - 1e-12):
            failures.append(f"J < 1 for λ={lam}, c={c}")
        if np.any(np.asarray(l_function(model, r)) > r + 1e-9):
            failures.append(f"L > r for λ={lam}, c={c}")
        scenario = _scenario(model)
        for curve in (outage_own_lane_hc(model, scenario), outage_own_lane_ppp(scenario)):
            if not _monotone_and_bounded(curve):
                failures.append(f"{curve.provenance.value} curve not monotone for λ={lam}, c={c}")
        approx = shifted_gamma_from_moments(palm_moments_behind(model, scenario, c + 10.0))
        if not approx.clamped:
            m = palm_moments_behind(model, scenario, c + 10.0)
            back = approx.moments()
            if not np.allclose([back.mean, back.variance, back.skewness], [m.mean, m.variance, m.skewness], rtol=1e-12):
                failures.append(f"shifted-gamma round trip off for λ={lam}, c={c}")
    config = McConfig(n_runs=_runs(10_000, scale, 500), seed=seed)
    scenario = _scenario(HardcoreLaneModel.from_intensity(LAM, C))
    if not np.array_equal(simulate_sir(config, scenario), simulate_sir(config, scenario)):
        failures.append("simulation not reproducible for a fixed seed")
    return CriterionResult(
        "structural invariants",
        not failures,
        {"failures": float(len(failures))},
        {"failures": 0.0},
        detail="; ".join(failures),
    )


CRITERIA: dict[str, Callable[[float, int], CriterionResult]] = {
    "summary": summary_statistics,
    "moments": interference_moments,
    "ppp": ppp_exactness,
    "own-lane": own_lane_outage,
    "other-lane": other_lane_outage,
    "multilane": multilane_end_to_end,
    "estimators": estimator_recovery,
    "special": special_functions,
    "invariants": structural_invariants,
}


def replicate(
    scale: float,
    seed: int,
    only: list[str] | None = None,
    on_start: Callable[[str], None] | None = None,
) -> ReplicationReport:
    """Run the selected checks (all by default) and collect their results."""
    results = []
    for key, check in CRITERIA.items():
        if only and key not in only:
            continue
        if on_start is not None:
            on_start(key)
        started = time.perf_counter()
        result = check(scale, seed)
        result.seconds = time.perf_counter() - started
        logger.info("%s: %s in %.1f s", result.name, "passed" if result.passed else "FAILED", result.seconds)
        results.append(result)
    return ReplicationReport(version=__version__, seed=seed, scale=scale, criteria=results)
