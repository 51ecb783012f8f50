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

"""車間距離のサンプルから車線ごとの (λ, c) を推定するモジュール

PPP の最尤推定、モーメント法、ハードコアの最尤推定、経験 CDF に対する
非線形最小二乗 (2 パラメータ / 強度固定の 1 パラメータ) を提供する。
いずれの推定値も 0 ≤ ĉ ≤ 1/λ̂ を満たすように制約する。
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from dataclasses_json import dataclass_json
from scipy import optimize

from ._types import FloatArray
from .constants import (
    LAMBDA_C_CEILING,
    LSQ_BINS,
    LSQ_MAX_ITERATIONS,
    LSQ_STEP_TOLERANCE,
    LSQ_UPPER_PERCENTILE,
)
from .errors import DomainError, FittingError, InsufficientDataError
from .hardcore import HardcoreLaneModel


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GapSample:
    """Inter-vehicle distances z_{i,1..n} of one lane, n ≥ 2."""

    gaps: FloatArray
    lane_id: int = 0

    def __post_init__(self) -> None:
        gaps = np.asarray(self.gaps, dtype=float).ravel()
        if gaps.size < 2:
            raise InsufficientDataError(f"lane {self.lane_id}: {gaps.size} gaps, at least two are needed")
        if np.any(~np.isfinite(gaps)) or np.any(gaps <= 0):
            raise DomainError(f"lane {self.lane_id}: gaps must be positive and finite")
        object.__setattr__(self, "gaps", gaps)

    @property
    def n(self) -> int:
        return int(self.gaps.size)

    @property
    def mean(self) -> float:
        return float(np.mean(self.gaps))

    def ecdf(self, x: np.ndarray) -> FloatArray:
        ordered = np.sort(self.gaps)
        return np.searchsorted(ordered, np.asarray(x, dtype=float), side="right") / ordered.size


class FitMethod(str, enum.Enum):
    PPP_MLE = "PPP_MLE"
    MOM = "MOM"
    HC_MLE = "HC_MLE"
    LSQ2 = "LSQ2"
    LSQ1_FIXED_INTENSITY = "LSQ1_FIXED_INTENSITY"


@dataclass_json
@dataclass(frozen=True)
class FitResult:
    """Estimated lane parameters.

    ``c_hat`` is absent for the PPP fit. ``mu_hat`` is the rate of the exponential part, tied
    to ``lambda_hat`` by the coupling; ``raw_c_hat`` keeps the estimate before clamping.
    """

    lane_id: int
    method: FitMethod
    lambda_hat: float
    c_hat: Optional[float] = None
    rss: Optional[float] = None
    clamped: bool = False
    mu_hat: Optional[float] = None
    raw_c_hat: Optional[float] = field(default=None)

    def to_model(self) -> HardcoreLaneModel:
        if self.c_hat is None:
            return HardcoreLaneModel.ppp(self.lambda_hat)
        return HardcoreLaneModel.from_intensity(self.lambda_hat, self.c_hat)


def shifted_exponential_cdf(x: np.ndarray, mu: float, c: float) -> FloatArray:
    """(1 − e^{−μ(x − c)})₊, zero below the shift."""
    x = np.asarray(x, dtype=float)
    return np.where(x > c, -np.expm1(-mu * np.maximum(x - c, 0.0)), 0.0)


def default_bins(sample: GapSample) -> FloatArray:
    return np.linspace(0.0, float(np.percentile(sample.gaps, LSQ_UPPER_PERCENTILE)), LSQ_BINS)


def _rss(sample: GapSample, mu: float, c: float, bins: np.ndarray | None = None) -> float:
    x = default_bins(sample) if bins is None else bins
    return float(np.sum((sample.ecdf(x) - shifted_exponential_cdf(x, mu, c)) ** 2))


def _clamp(c_raw: float, lam: float) -> tuple[float, bool]:
    c = min(max(c_raw, 0.0), LAMBDA_C_CEILING / lam)
    return c, c != c_raw


def _hardcore_result(
    sample: GapSample,
    method: FitMethod,
    lam: float,
    c_raw: float,
    rss: float | None = None,
) -> FitResult:
    c, clamped = _clamp(c_raw, lam)
    if clamped:
        logger.warning("lane %d: %s estimate ĉ = %.4g clamped to %.4g", sample.lane_id, method.value, c_raw, c)
    mu = lam / (1.0 - lam * c)
    return FitResult(
        lane_id=sample.lane_id,
        method=method,
        lambda_hat=lam,
        c_hat=c,
        rss=_rss(sample, mu, c) if rss is None else rss,
        clamped=clamped,
        mu_hat=mu,
        raw_c_hat=c_raw,
    )


def fit_ppp_mle(sample: GapSample) -> FitResult:
    """λ̂ = n / Σz, the Poisson maximum-likelihood estimate."""
    lam = 1.0 / sample.mean
    return FitResult(
        lane_id=sample.lane_id,
        method=FitMethod.PPP_MLE,
        lambda_hat=lam,
        rss=_rss(sample, lam, 0.0),
        mu_hat=lam,
    )


def fit_mom(sample: GapSample) -> FitResult:
    """Match mean c + 1/μ and variance 1/μ² to the sample moments.

    ĉ = mean − std may come out negative; it is then clamped to zero and flagged, while λ̂
    stays the inverse sample mean.
    """
    std = float(np.std(sample.gaps, ddof=1))
    if std == 0.0:
        raise FittingError(f"lane {sample.lane_id}: zero sample variance")
    return _hardcore_result(sample, FitMethod.MOM, 1.0 / sample.mean, sample.mean - std)


def fit_hc_mle(sample: GapSample) -> FitResult:
    """ĉ = min gap and μ̂ = 1/(mean − ĉ); λ̂ follows from the coupling and equals 1/mean."""
    c = float(np.min(sample.gaps))
    if sample.mean - c <= 0.0:
        raise FittingError(f"lane {sample.lane_id}: all gaps are equal, the exponential rate diverges")
    return _hardcore_result(sample, FitMethod.HC_MLE, 1.0 / sample.mean, c)


def _initial_guess(x: np.ndarray, ecdf: np.ndarray) -> tuple[float, float]:
    step = float(x[1] - x[0]) if x.size > 1 else 0.0
    positive = np.flatnonzero(ecdf > 0)
    c0 = max(float(x[positive[0]]) - step, 0.0) if positive.size else 0.0
    half = np.flatnonzero(ecdf >= 0.5)
    x_med = float(x[half[0]]) if half.size else float(x[-1])
    return np.log(2.0) / max(x_med - c0, step, 1e-9), c0


def fit_shifted_exponential_cdf(
    x: np.ndarray,
    ecdf: np.ndarray,
    fixed_lambda: float | None = None,
    initial: tuple[float, float] | None = None,
) -> tuple[float, float, float]:
    """Least-squares (μ̂, ĉ, rss) of (1 − e^{−μ(x − c)})₊ against ``ecdf`` sampled at ``x``.

    With ``fixed_lambda`` only ĉ is searched, on [0, 1/λ), and μ̂ = λ/(1 − λĉ).
    """
    x = np.asarray(x, dtype=float)
    ecdf = np.asarray(ecdf, dtype=float)
    if x.shape != ecdf.shape or x.ndim != 1:
        raise DomainError("bins and ECDF values must be 1-D of equal length")
    mu0, c0 = _initial_guess(x, ecdf) if initial is None else initial

    if fixed_lambda is None:
        def residuals(p: np.ndarray) -> np.ndarray:
            return shifted_exponential_cdf(x, p[0], p[1]) - ecdf

        start = np.array([mu0, c0])
        bounds = ([1e-12, 0.0], [np.inf, np.inf])
    else:
        lam = float(fixed_lambda)
        c_max = LAMBDA_C_CEILING / lam

        def residuals(p: np.ndarray) -> np.ndarray:
            return shifted_exponential_cdf(x, lam / (1.0 - lam * p[0]), p[0]) - ecdf

        start = np.array([min(c0, 0.9 * c_max)])
        bounds = ([0.0], [c_max])

    result = optimize.least_squares(
        residuals,
        start,
        bounds=bounds,
        method="trf",
        x_scale="jac",
        xtol=LSQ_STEP_TOLERANCE,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=LSQ_MAX_ITERATIONS,
    )
    if fixed_lambda is None:
        mu, c = float(result.x[0]), float(result.x[1])
    else:
        c = float(result.x[0])
        mu = lam / (1.0 - lam * c)
    rss = float(2.0 * result.cost)
    if result.status == 0:
        raise FittingError(f"least squares stopped after {result.nfev} evaluations", best=(mu, c, rss))
    return mu, c, rss


def fit_lsq(
    sample: GapSample,
    bins: np.ndarray | None = None,
    fix_intensity: bool = False,
) -> FitResult:
    """Least-squares fit of the shifted-exponential CDF to the sample ECDF on ``bins``.

    ``fix_intensity`` first sets λ̂ to the PPP estimate and searches ĉ alone.
    """
    x = default_bins(sample) if bins is None else np.asarray(bins, dtype=float)
    if x.size < 5:
        raise DomainError(f"least squares needs at least five bins, got {x.size}")
    if x[-1] <= np.min(sample.gaps):
        raise DomainError("bins end below the smallest gap")
    ecdf = sample.ecdf(x)
    fixed = 1.0 / sample.mean if fix_intensity else None
    mu, c, rss = fit_shifted_exponential_cdf(x, ecdf, fixed_lambda=fixed)
    lam = mu / (1.0 + mu * c)
    method = FitMethod.LSQ1_FIXED_INTENSITY if fix_intensity else FitMethod.LSQ2
    return _hardcore_result(sample, method, lam, c, rss=rss)


def fit_all(sample: GapSample, bins: np.ndarray | None = None) -> list[FitResult]:
    """Every estimator on one lane, in the order PPP, MoM, MLE, LSQ, LSQ with fixed λ."""
    return [
        fit_ppp_mle(sample),
        fit_mom(sample),
        fit_hc_mle(sample),
        fit_lsq(sample, bins),
        fit_lsq(sample, bins, fix_intensity=True),
    ]
