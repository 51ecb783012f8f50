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

"""干渉のモーメント、シフトガンマ近似、および停止確率の解析式を定義するモジュール

自車線 (送信機の後方と受信機の前方) と他車線について干渉の平均・分散・歪度を求め、
シフトガンマ分布の Laplace 変換をリンク距離で平均して停止確率を得る。
比較用に PPP の閉形式および数値積分形も提供する。
"""

from __future__ import annotations

import enum
import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from dataclasses_json import dataclass_json
from scipy import integrate

from ._types import FloatArray
from .constants import (
    GUARD_ZONE_DEFAULTS,
    GUARD_ZONE_PHI_MAX,
    QUAD_ABS_TOL,
    QUAD_LIMIT,
    QUAD_REL_TOL,
    THETA_DB_RANGE,
)
from .errors import ConfigurationError, DomainError, NumericError, QuadratureError
from .fitting import FitResult
from .hardcore import HardcoreLaneModel
from .special import hyp2f1_guardzone, hyp2f1_outage, pi_csc


logger = logging.getLogger(__name__)


def theta_grid_db(lo: float = THETA_DB_RANGE[0], hi: float = THETA_DB_RANGE[1], n: int = THETA_DB_RANGE[2]) -> FloatArray:
    """Linear SIR thresholds log-spaced between ``lo`` and ``hi`` dB."""
    if n < 1 or hi < lo:
        raise DomainError(f"invalid threshold grid {lo}:{hi}:{n}")
    return 10.0 ** (np.linspace(lo, hi, n) / 10.0)


def guard_zone(ell: float, phi: float) -> float:
    """r₀ = ℓ / tan(φ/2): other-lane vehicles closer than r₀ stay outside the antenna beam."""
    if not 0 < phi < GUARD_ZONE_PHI_MAX:
        raise DomainError(f"beamwidth must lie in (0, π), got {phi!r}")
    if not ell > 0:
        raise DomainError(f"inter-lane spacing must be positive, got {ell!r}")
    return ell / math.tan(phi / 2.0)


@dataclass_json
@dataclass(frozen=True)
class OtherLane:
    """An interfering lane parallel to the link lane, ``ell`` meters away."""

    model: HardcoreLaneModel
    ell: float


@dataclass_json
@dataclass(frozen=True)
class LinkScenario:
    """Radio parameters of one transmitter-receiver experiment.

    The received power at distance d is d^{−η} (unit transmit power); vehicles ahead of the
    receiver are attenuated by the backlobe factor ``g``.
    """

    eta: float
    xi: float
    g: float
    theta_grid: tuple[float, ...]
    own_lane_model: HardcoreLaneModel
    other_lanes: tuple[OtherLane, ...] = ()
    phi: float = GUARD_ZONE_DEFAULTS[1]

    def __post_init__(self) -> None:
        if not self.eta > 1:
            raise ConfigurationError(f"pathloss exponent must exceed 1, got {self.eta!r}")
        if not 0 <= self.xi <= 1:
            raise ConfigurationError(f"activity probability must lie in [0, 1], got {self.xi!r}")
        if not 0 < self.g < 1:
            raise ConfigurationError(f"backlobe attenuation must lie in (0, 1), got {self.g!r}")
        theta = np.asarray(self.theta_grid, dtype=float)
        if theta.ndim != 1 or theta.size == 0 or np.any(theta <= 0) or np.any(np.diff(theta) <= 0):
            raise ConfigurationError("SIR thresholds must be positive and increasing")
        object.__setattr__(self, "theta_grid", tuple(float(t) for t in theta))
        object.__setattr__(self, "other_lanes", tuple(self.other_lanes))
        for lane in self.other_lanes:
            guard_zone(lane.ell, self.phi)

    @property
    def theta(self) -> FloatArray:
        return np.asarray(self.theta_grid, dtype=float)

    def guard_zones(self) -> list[float]:
        return [guard_zone(lane.ell, self.phi) for lane in self.other_lanes]

    def with_lanes(
        self,
        lanes: Sequence[HardcoreLaneModel],
        link_lane: int,
        lane_spacing: float = GUARD_ZONE_DEFAULTS[0],
    ) -> LinkScenario:
        """Scenario whose link sits on ``lanes[link_lane]``; lane i is |i − link| spacings away."""
        if not 0 <= link_lane < len(lanes):
            raise ConfigurationError(f"link lane {link_lane} is not one of the {len(lanes)} lanes")
        others = tuple(
            OtherLane(model, abs(i - link_lane) * lane_spacing)
            for i, model in enumerate(lanes)
            if i != link_lane
        )
        return replace(self, own_lane_model=lanes[link_lane], other_lanes=others)


@dataclass(frozen=True)
class MomentTriple:
    """Mean, variance and skewness of the interference power."""

    mean: float
    variance: float
    skewness: float

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class ShiftedGammaApprox:
    """Shifted gamma with shape ``k``, scale ``beta`` and shift ``epsilon``."""

    k: float
    beta: float
    epsilon: float
    clamped: bool = False

    def laplace(self, s: float | np.ndarray) -> float | FloatArray:
        """e^{−sε} (1 + sβ)^{−k}."""
        s_arr = np.asarray(s, dtype=float)
        value = np.exp(-s_arr * self.epsilon - self.k * np.log1p(s_arr * self.beta))
        return float(value) if value.ndim == 0 else value

    def moments(self) -> MomentTriple:
        return MomentTriple(
            mean=self.epsilon + self.k * self.beta,
            variance=self.k * self.beta**2,
            skewness=2.0 / math.sqrt(self.k),
        )


class OutageProvenance(str, enum.Enum):
    HC_ANALYTIC = "HC_ANALYTIC"
    PPP_ANALYTIC = "PPP_ANALYTIC"
    MONTE_CARLO = "MONTE_CARLO"


_MONOTONE_SLACK = 1e-6


@dataclass(frozen=True)
class OutageCurve:
    """Outage probability on a threshold grid; ``std_error`` is set for simulated curves."""

    theta_grid: FloatArray
    p_out: FloatArray
    provenance: OutageProvenance
    std_error: Optional[FloatArray] = field(default=None)

    def __post_init__(self) -> None:
        theta = np.asarray(self.theta_grid, dtype=float)
        p = np.asarray(self.p_out, dtype=float)
        if theta.ndim != 1 or theta.shape != p.shape:
            raise DomainError("threshold grid and outage values must be 1-D of equal length")
        if np.any(np.isnan(p)) or np.any(p < -_MONOTONE_SLACK) or np.any(p > 1 + _MONOTONE_SLACK):
            raise NumericError("outage probabilities left [0, 1]")
        if np.any(np.diff(p) < -_MONOTONE_SLACK):
            raise NumericError("outage curve decreases in the threshold")
        object.__setattr__(self, "theta_grid", theta)
        object.__setattr__(self, "p_out", np.clip(p, 0.0, 1.0))
        object.__setattr__(self, "provenance", OutageProvenance(self.provenance))
        if self.std_error is not None:
            object.__setattr__(self, "std_error", np.asarray(self.std_error, dtype=float))

    @property
    def grid(self) -> FloatArray:
        return self.theta_grid

    @property
    def values(self) -> FloatArray:
        return self.p_out

    @property
    def theta_db(self) -> FloatArray:
        return 10.0 * np.log10(self.theta_grid)


def _check_xi(scenario: LinkScenario) -> None:
    if scenario.xi == 0:
        raise DomainError("with ξ = 0 there is no interference and the skewness is undefined")


def _behind(model: HardcoreLaneModel, scenario: LinkScenario, d: np.ndarray) -> tuple[np.ndarray, ...]:
    lam, c, eta, xi = model.lam, model.c, scenario.eta, scenario.xi
    x = c + d
    mean = lam * xi * x ** (1 - eta) / (eta - 1)
    var = 2 * lam * xi * x ** (1 - 2 * eta) * (1 - lam * c * xi) / (2 * eta - 1)
    third = 6 * lam * xi * x ** (1 - 3 * eta) * (1 - lam * c * xi) ** 2 / (3 * eta - 1)
    return mean, var, third * var**-1.5


def palm_moments_behind(model: HardcoreLaneModel, scenario: LinkScenario, d: float) -> MomentTriple:
    """Moments of the interference from vehicles behind the transmitter, link distance ``d``.

    The pair correlation is replaced by λ² beyond one hardcore distance, which leaves the
    first interferer at c + d and scales the higher cumulants by powers of (1 − λcξ).
    """
    _check_xi(scenario)
    if d < model.c:
        raise DomainError(f"link distance {d} is shorter than the hardcore distance {model.c}")
    mean, var, skew = _behind(model, scenario, np.asarray(float(d)))
    return MomentTriple(float(mean), float(var), float(skew))


def palm_moments_front(model: HardcoreLaneModel, scenario: LinkScenario) -> MomentTriple:
    """Moments of the attenuated interference from vehicles ahead of the receiver.

    They do not depend on the link distance; the leading distance is one hardcore c.
    """
    _check_xi(scenario)
    if model.is_poisson:
        raise DomainError("front moments diverge for c = 0; use the PPP outage path instead")
    mean, var, skew = _behind(model, scenario, np.asarray(0.0))
    g = scenario.g
    return MomentTriple(float(g * mean), float(g * var), float(skew / math.sqrt(g)))


def moments_other_lane(model: HardcoreLaneModel, scenario: LinkScenario, r0: float) -> MomentTriple:
    """Moments of a parallel lane's interference beyond the guard zone r₀ on both sides."""
    _check_xi(scenario)
    if not r0 > 0:
        raise DomainError(f"guard zone must be positive, got {r0!r}")
    lam, c, eta, xi, g = model.lam, model.c, scenario.eta, scenario.xi, scenario.g
    lcx = lam * c * xi
    mean = lam * xi * (1 + g) * r0 ** (1 - eta) / (eta - 1)
    var = 2 * lam * xi * (1 + g) * r0 ** (1 - 2 * eta) * (1 - lcx + 0.5 * lcx**2) / (2 * eta - 1)
    skew = (
        6 * lam * xi * r0 ** (1 - 3 * eta) / ((3 * eta - 1) * math.sqrt(1 + g))
        * (2 * lam * xi * r0 ** (1 - 2 * eta) / (2 * eta - 1)) ** -1.5
        * (1 - lcx / 2)
    )
    return MomentTriple(mean, var, skew)


def _shifted_gamma(mean: np.ndarray, var: np.ndarray, skew: np.ndarray) -> tuple[np.ndarray, ...]:
    k = 4.0 / skew**2
    beta = np.sqrt(var / k)
    epsilon = mean - k * beta
    clamped = epsilon < 0
    # keep the mean, give up the variance
    beta = np.where(clamped, mean / k, beta)
    epsilon = np.where(clamped, 0.0, epsilon)
    return k, beta, epsilon, clamped


def shifted_gamma_from_moments(m: MomentTriple) -> ShiftedGammaApprox:
    """k = 4/S², β = (V/k)^{1/2}, ε = E − kβ.

    A negative shift is clamped to zero with β = E/k so the transform stays that of a
    nonnegative variable; the result is flagged.
    """
    values = (m.mean, m.variance, m.skewness)
    if not all(math.isfinite(v) for v in values):
        raise DomainError(f"moments must be finite, got {m}")
    if not m.skewness > 0:
        raise DomainError(f"skewness must be positive, got {m.skewness!r}")
    k, beta, epsilon, clamped = _shifted_gamma(*(np.asarray(v) for v in values))
    if clamped:
        logger.warning("negative shift for %s, clamped to zero", m)
    return ShiftedGammaApprox(float(k), float(beta), float(epsilon), bool(clamped))


LogLaplace = Callable[[float], FloatArray]


def _own_lane_hardcore(model: HardcoreLaneModel, scenario: LinkScenario) -> LogLaplace:
    theta, eta = scenario.theta, scenario.eta
    front = shifted_gamma_from_moments(palm_moments_front(model, scenario))
    # ε/E does not depend on the link distance, so one probe reports clamping for every r
    shifted_gamma_from_moments(palm_moments_behind(model, scenario, model.c + 1.0))

    def log_laplace(r: float) -> FloatArray:
        s = theta * r**eta
        k, beta, epsilon, _ = _shifted_gamma(*_behind(model, scenario, np.asarray(r)))
        return (
            -s * (epsilon + front.epsilon)
            - k * np.log1p(s * beta)
            - front.k * np.log1p(s * front.beta)
        )

    return log_laplace


def _other_lane_hardcore(model: HardcoreLaneModel, scenario: LinkScenario, r0: float) -> LogLaplace:
    theta, eta = scenario.theta, scenario.eta
    gamma = shifted_gamma_from_moments(moments_other_lane(model, scenario, r0))

    def log_laplace(r: float) -> FloatArray:
        s = theta * r**eta
        return -s * gamma.epsilon - gamma.k * np.log1p(s * gamma.beta)

    return log_laplace


def ppp_own_lane_exponent(theta: np.ndarray, eta: float, g: float) -> FloatArray:
    """A(θ) with own-lane PPP transform e^{−λξ r A(θ)}.

    A(θ) = θ/(η−1) ₂F₁(1, 1−1/η; 2−1/η; −θ) + (π/η) csc(π/η) (gθ)^{1/η}: the first term
    collects interferers behind the transmitter, the second the attenuated ones ahead.
    """
    theta = np.asarray(theta, dtype=float)
    return theta / (eta - 1) * np.asarray(hyp2f1_outage(eta, theta)) + pi_csc(eta) * (g * theta) ** (1 / eta)


def t_guard(r: float, r0: float, theta: np.ndarray, eta: float) -> FloatArray:
    """t(r, r₀, θ) = ∫_{r₀}^∞ θr^η x^{−η} / (1 + θr^η x^{−η}) dx.

    Closed form (π/η) csc(π/η) θ^{1/η} r − r₀ ₂F₁(1, 1/η; 1 + 1/η; −r₀^η/(θr^η)).
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    out = np.zeros_like(theta)
    if r <= 0:
        return out
    positive = theta > 0
    th = theta[positive]
    z = r0**eta / (th * r**eta)
    full = pi_csc(eta) * th ** (1 / eta) * r
    # the two terms nearly cancel for r ≪ r₀
    out[positive] = np.maximum(full - r0 * np.asarray(hyp2f1_guardzone(eta, z)), 0.0)
    return out


def ppp_own_lane_laplace(lam: float, scenario: LinkScenario) -> LogLaplace:
    exponent = lam * scenario.xi * ppp_own_lane_exponent(scenario.theta, scenario.eta, scenario.g)

    def log_laplace(r: float) -> FloatArray:
        return -exponent * r

    return log_laplace


def ppp_other_lane_laplace(lam: float, scenario: LinkScenario, r0: float) -> LogLaplace:
    if not r0 > 0:
        raise DomainError(f"guard zone must be positive, got {r0!r}")
    scale = lam * scenario.xi * (1 + scenario.g)
    theta, eta = scenario.theta, scenario.eta

    def log_laplace(r: float) -> FloatArray:
        return -scale * t_guard(r, r0, theta, eta)

    return log_laplace


def average_over_link(
    link: HardcoreLaneModel,
    transforms: Sequence[LogLaplace],
    n_theta: int,
) -> FloatArray:
    """1 − ∫_c^∞ Π L(θ, r) μe^{−μ(r−c)} dr for every threshold at once.

    The substitution u = e^{−μ(r−c)} maps the link-distance law onto a uniform one on (0, 1].
    """
    c, mu = link.c, link.mu

    def integrand(u: float) -> FloatArray:
        r = c - math.log(max(u, 1e-300)) / mu
        total = np.zeros(n_theta)
        for transform in transforms:
            total = total + transform(r)
        return np.exp(total)

    value, error, info = integrate.quad_vec(
        integrand,
        0.0,
        1.0,
        epsabs=QUAD_ABS_TOL,
        epsrel=QUAD_REL_TOL,
        limit=QUAD_LIMIT,
        full_output=True,
    )
    if not info.success:
        raise QuadratureError(f"outage integral did not converge: {info.message} (error estimate {error:.3g})")
    return 1.0 - np.asarray(value)


def _curve(scenario: LinkScenario, p_out: np.ndarray, provenance: OutageProvenance) -> OutageCurve:
    return OutageCurve(scenario.theta, p_out, provenance)


def _no_interference(scenario: LinkScenario, provenance: OutageProvenance) -> OutageCurve | None:
    if scenario.xi == 0:
        return _curve(scenario, np.zeros(len(scenario.theta_grid)), provenance)
    return None


def _hardcore_outage(scenario: LinkScenario) -> OutageCurve:
    silent = _no_interference(scenario, OutageProvenance.HC_ANALYTIC)
    if silent is not None:
        return silent
    transforms = [_own_lane_hardcore(scenario.own_lane_model, scenario)]
    transforms += [
        _other_lane_hardcore(lane.model, scenario, r0)
        for lane, r0 in zip(scenario.other_lanes, scenario.guard_zones())
    ]
    p_out = average_over_link(scenario.own_lane_model, transforms, len(scenario.theta_grid))
    return _curve(scenario, p_out, OutageProvenance.HC_ANALYTIC)


def outage_own_lane_hc(model: HardcoreLaneModel, scenario: LinkScenario) -> OutageCurve:
    """Outage on the link lane from interferers behind the transmitter and ahead of the receiver."""
    return _hardcore_outage(replace(scenario, own_lane_model=model, other_lanes=()))


def outage_own_lane_ppp(scenario: LinkScenario) -> OutageCurve:
    """Closed-form PPP own-lane outage; the intensity cancels out."""
    theta, eta, xi, g = scenario.theta, scenario.eta, scenario.xi, scenario.g
    f = 1.0 + pi_csc(eta) * xi * (g * theta) ** (1 / eta)
    p_out = 1.0 - (eta - 1) / ((eta - 1) * f + xi * theta * np.asarray(hyp2f1_outage(eta, theta)))
    return _curve(scenario, p_out, OutageProvenance.PPP_ANALYTIC)


def _quad(func: Callable[[float], float], a: float, b: float) -> float:
    value, error, *rest = integrate.quad(
        func, a, b, epsabs=QUAD_ABS_TOL, epsrel=QUAD_REL_TOL, limit=QUAD_LIMIT, full_output=1
    )
    if len(rest) > 1:
        raise QuadratureError(f"quadrature on [{a}, {b}] failed: {rest[1]}")
    return value


def outage_own_lane_ppp_integral(lam: float, scenario: LinkScenario) -> OutageCurve:
    """The PPP own-lane outage by direct numerical integration of both nested integrals.

    Independent of the hypergeometric closed form and used to cross-check it.
    """
    if not lam > 0:
        raise DomainError(f"intensity must be positive, got {lam!r}")
    eta, xi, g = scenario.eta, scenario.xi, scenario.g
    p_out = []
    for theta in scenario.theta:
        # inner integrals per unit link distance, x = r y
        behind = _quad(lambda y: theta / (y**eta + theta), 1.0, np.inf)
        front = _quad(lambda y: g * theta / (y**eta + g * theta), 0.0, np.inf)
        rate = lam * xi * (behind + front)
        covered = _quad(lambda r: math.exp(-rate * r - lam * r) * lam, 0.0, np.inf)
        p_out.append(1.0 - covered)
    return _curve(scenario, np.asarray(p_out), OutageProvenance.PPP_ANALYTIC)


def outage_other_lane_hc(model: HardcoreLaneModel, scenario: LinkScenario, r0: float) -> OutageCurve:
    """Outage from one parallel hardcore lane alone; the link distance follows the link lane."""
    silent = _no_interference(scenario, OutageProvenance.HC_ANALYTIC)
    if silent is not None:
        return silent
    transform = _other_lane_hardcore(model, scenario, r0)
    p_out = average_over_link(scenario.own_lane_model, [transform], len(scenario.theta_grid))
    return _curve(scenario, p_out, OutageProvenance.HC_ANALYTIC)


def outage_other_lane_ppp(lam: float, scenario: LinkScenario, r0: float) -> OutageCurve:
    """Outage from one parallel PPP lane of intensity λ, link distance Exp(λ)."""
    silent = _no_interference(scenario, OutageProvenance.PPP_ANALYTIC)
    if silent is not None:
        return silent
    transform = ppp_other_lane_laplace(lam, scenario, r0)
    p_out = average_over_link(HardcoreLaneModel.ppp(lam), [transform], len(scenario.theta_grid))
    return _curve(scenario, p_out, OutageProvenance.PPP_ANALYTIC)


LaneEstimate = FitResult | HardcoreLaneModel


def _as_model(lane: LaneEstimate) -> HardcoreLaneModel:
    return lane.to_model() if isinstance(lane, FitResult) else lane


def multilane_scenario(
    fits: Sequence[LaneEstimate],
    scenario: LinkScenario,
    link_lane: int | None,
    lane_spacing: float = GUARD_ZONE_DEFAULTS[0],
) -> LinkScenario:
    """``scenario``'s radio parameters with lanes taken from per-lane estimates."""
    if link_lane is None:
        raise ConfigurationError("one lane must be designated as the link lane")
    return scenario.with_lanes([_as_model(f) for f in fits], link_lane, lane_spacing)


def outage_multilane_hc(
    fits: Sequence[LaneEstimate],
    scenario: LinkScenario,
    link_lane: int | None,
    lane_spacing: float = GUARD_ZONE_DEFAULTS[0],
) -> OutageCurve:
    """Aggregate outage over all lanes with hardcore estimates; link distance from the link lane."""
    return _hardcore_outage(multilane_scenario(fits, scenario, link_lane, lane_spacing))


def outage_multilane_ppp(
    fits: Sequence[LaneEstimate],
    scenario: LinkScenario,
    link_lane: int | None,
    lane_spacing: float = GUARD_ZONE_DEFAULTS[0],
) -> OutageCurve:
    """Aggregate outage when every lane is a PPP with the estimated intensities."""
    full = multilane_scenario(fits, scenario, link_lane, lane_spacing)
    silent = _no_interference(full, OutageProvenance.PPP_ANALYTIC)
    if silent is not None:
        return silent
    lam = full.own_lane_model.lam
    transforms = [ppp_own_lane_laplace(lam, full)]
    transforms += [
        ppp_other_lane_laplace(lane.model.lam, full, r0)
        for lane, r0 in zip(full.other_lanes, full.guard_zones())
    ]
    p_out = average_over_link(HardcoreLaneModel.ppp(lam), transforms, len(full.theta_grid))
    return _curve(full, p_out, OutageProvenance.PPP_ANALYTIC)
