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

"""Cowan M2 ハードコア点過程の解析的な定義を提供するモジュール

車間距離が c + Exp(μ) に従う 1 次元更新過程について、パラメータの結合条件、
相関関数、および閉じた形の要約統計量 (J, K, L, G, F) を定義する。
"""

from __future__ import annotations

import enum
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from dataclasses_json import config, dataclass_json
from scipy import stats

from ._types import FloatArray
from .constants import COUPLING_TOLERANCE, LAMBDA_C_CEILING
from .errors import DomainError, InvalidModelError
from .special import regularized_upper_gamma


@dataclass_json
@dataclass(frozen=True)
class HardcoreLaneModel:
    """Road-traffic parameters of one lane.

    ``lam`` is the intensity (vehicles per meter), ``c`` the hardcore distance and ``mu`` the
    rate of the exponential part of the gap. The three are tied by 1/λ = c + 1/μ, so build
    instances with :meth:`from_intensity`, :meth:`from_rate` or :meth:`ppp`.
    """

    lam: float = field(metadata=config(field_name="lambda"))
    c: float
    mu: float

    def __post_init__(self) -> None:
        lam, c, mu = self.lam, self.c, self.mu
        if not (math.isfinite(lam) and lam > 0):
            raise InvalidModelError(f"intensity must be positive, got {lam!r}")
        if not (math.isfinite(mu) and mu > 0):
            raise InvalidModelError(f"rate must be positive, got {mu!r}")
        if not (math.isfinite(c) and c >= 0):
            raise InvalidModelError(f"hardcore distance must be nonnegative, got {c!r}")
        if lam * c > LAMBDA_C_CEILING:
            raise InvalidModelError(f"λc = {lam * c:.12g} must stay below 1")
        if abs(lam * (1.0 + mu * c) - mu) > COUPLING_TOLERANCE * max(1.0, mu):
            raise InvalidModelError(f"λ = {lam!r}, c = {c!r}, μ = {mu!r} violate λ = μ / (1 + μc)")

    @classmethod
    def from_intensity(cls, lam: float, c: float) -> HardcoreLaneModel:
        if not lam > 0:
            raise InvalidModelError(f"intensity must be positive, got {lam!r}")
        if not c >= 0:
            raise InvalidModelError(f"hardcore distance must be nonnegative, got {c!r}")
        if lam * c > LAMBDA_C_CEILING:
            raise InvalidModelError(f"λc = {lam * c:.12g} must stay below 1")
        return cls(lam=lam, c=c, mu=lam / (1.0 - lam * c))

    @classmethod
    def from_rate(cls, mu: float, c: float) -> HardcoreLaneModel:
        if not mu > 0:
            raise InvalidModelError(f"rate must be positive, got {mu!r}")
        if not c >= 0:
            raise InvalidModelError(f"hardcore distance must be nonnegative, got {c!r}")
        return cls(lam=mu / (1.0 + mu * c), c=c, mu=mu)

    @classmethod
    def ppp(cls, lam: float) -> HardcoreLaneModel:
        """Poisson limit c = 0, where λ = μ."""
        return cls.from_intensity(lam, 0.0)

    @property
    def is_poisson(self) -> bool:
        return self.c == 0.0

    @property
    def mean_gap(self) -> float:
        return self.c + 1.0 / self.mu

    @property
    def packing(self) -> float:
        """λc, the fraction of the road blocked by hardcores."""
        return self.lam * self.c


class SummaryKind(str, enum.Enum):
    J = "J"
    K = "K"
    L = "L"
    G = "G"
    F = "F"
    PCF = "PCF"


@dataclass(frozen=True)
class SummaryCurve:
    """A summary statistic tabulated on a distance grid."""

    r_grid: FloatArray
    values: FloatArray
    kind: SummaryKind

    def __post_init__(self) -> None:
        r = np.asarray(self.r_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape:
            raise DomainError(f"grid and values must be 1-D of equal length, got {r.shape} and {v.shape}")
        if r.size and (np.any(r < 0) or np.any(np.diff(r) <= 0)):
            raise DomainError("distance grid must be nonnegative and strictly increasing")
        object.__setattr__(self, "r_grid", r)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "kind", SummaryKind(self.kind))

    @property
    def grid(self) -> FloatArray:
        return self.r_grid

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.r_grid.tolist(), self.values.tolist()))


def _as_output(value: np.ndarray, like: float | Sequence[float] | np.ndarray) -> float | FloatArray:
    return float(value) if np.ndim(like) == 0 else value


def _check_distance(r: np.ndarray, name: str = "distance") -> None:
    if np.any(np.isnan(r)) or np.any(r < 0):
        raise DomainError(f"{name} must be nonnegative")


def _pcf_scalar(model: HardcoreLaneModel, r: float) -> float:
    if model.is_poisson:
        return model.lam**2 if r > 0 else 0.0
    if r <= model.c:
        return 0.0
    # r in (kc, (k+1)c] receives the terms j = 1..k
    k = math.ceil(r / model.c) - 1
    j = np.arange(1, k + 1)
    return float(model.lam * stats.gamma.pdf(r - j * model.c, a=j, scale=1.0 / model.mu).sum())


def pcf(model: HardcoreLaneModel, separation: float | np.ndarray) -> float | FloatArray:
    """Pair correlation ρ⁽²⁾ at the given separation (sign ignored).

    ρ⁽²⁾(r) = λ Σ_{j ≤ k} μ^j (r − jc)^{j−1} e^{−μ(r − jc)} / Γ(j) on the band r ∈ (kc, (k+1)c],
    i.e. λ times the renewal density of the gap process. It vanishes on [0, c] and tends to λ².
    """
    r = np.abs(np.asarray(separation, dtype=float))
    if np.any(np.isnan(r)):
        raise DomainError("separation must be a number")
    out = np.array([_pcf_scalar(model, float(x)) for x in r.ravel()]).reshape(r.shape)
    return _as_output(out, separation)


def pcf_normalized(model: HardcoreLaneModel, separation: float | np.ndarray) -> float | FloatArray:
    """ρ⁽²⁾ / (λμ); its plateau at large separation is 1 − λc."""
    value = np.asarray(pcf(model, separation)) / (model.lam * model.mu)
    return _as_output(value, separation)


def n_th_order_correlation(model: HardcoreLaneModel, points: Sequence[float]) -> float:
    """ρ⁽ⁿ⁾ of distinct points, λ^{2−n} Π ρ⁽²⁾ over consecutive sorted points."""
    ordered = np.sort(np.asarray(points, dtype=float))[::-1]
    if ordered.size < 2:
        raise DomainError("correlation needs at least two points")
    pair = np.asarray(pcf(model, np.diff(ordered)))
    return float(np.prod(pair) / model.lam ** (ordered.size - 2))


def third_order_correlation(model: HardcoreLaneModel, x: float, y: float, z: float) -> float:
    """ρ⁽³⁾(x, y, z) = ρ⁽²⁾(x − y) ρ⁽²⁾(y − z) / λ.

    The arguments are sorted so that x > y > z before evaluation; any order is accepted.
    """
    return n_th_order_correlation(model, (x, y, z))


def j_function(model: HardcoreLaneModel, r: float | np.ndarray) -> float | FloatArray:
    """J(r) = (1 − G(r)) / (1 − F(r)); constant for r > c."""
    r_arr = np.asarray(r, dtype=float)
    _check_distance(r_arr)
    if model.is_poisson:
        return _as_output(np.ones_like(r_arr), r)
    lam, c, mu = model.lam, model.c, model.mu
    inv = 1.0 / (1.0 - lam * c)
    # clip keeps the unused branches finite
    out = np.select(
        [r_arr <= c / 2, r_arr <= c],
        [
            1.0 / (1.0 - 2.0 * lam * np.minimum(r_arr, c / 2)),
            inv * np.exp(mu * (2.0 * np.minimum(r_arr, c) - c)),
        ],
        default=inv * math.exp(mu * c),
    )
    return _as_output(out, r)


def _k_scalar(model: HardcoreLaneModel, r: float) -> float:
    if model.is_poisson:
        return 2.0 * r
    n = math.floor(r / model.c)
    if n < 1:
        return 0.0
    k = np.arange(1, n + 1)
    upper = regularized_upper_gamma(k, np.maximum(model.mu * (r - model.c * k), 0.0))
    return float(2.0 / model.lam * np.sum(1.0 - np.asarray(upper)))


def k_function(model: HardcoreLaneModel, r: float | np.ndarray) -> float | FloatArray:
    """Ripley's K, (2/λ) Σ_{k ≤ ⌊r/c⌋} [1 − Q(k, μ(r − ck))]; K(r) = 2r when c = 0."""
    r_arr = np.asarray(r, dtype=float)
    _check_distance(r_arr)
    out = np.array([_k_scalar(model, float(x)) for x in r_arr.ravel()]).reshape(r_arr.shape)
    return _as_output(out, r)


def l_function(model: HardcoreLaneModel, r: float | np.ndarray) -> float | FloatArray:
    """Besag's L = K / 2, never above r."""
    return _as_output(np.asarray(k_function(model, r)) / 2.0, r)


def nearest_neighbor_cdf(model: HardcoreLaneModel, r: float | np.ndarray) -> float | FloatArray:
    """G(r) = 1 − e^{−2μ(r − c)} for r ≥ c, zero below."""
    r_arr = np.asarray(r, dtype=float)
    _check_distance(r_arr)
    out = -np.expm1(-2.0 * model.mu * np.maximum(r_arr - model.c, 0.0))
    return _as_output(out, r)


def contact_cdf(model: HardcoreLaneModel, r: float | np.ndarray) -> float | FloatArray:
    """Empty-space CDF F(r).

    F(r) = 2λr for r ≤ c/2 and 1 − (1 − λc) e^{−μ(2r − c)} beyond. This form is reconstructed
    from the closed-form J and G through J (1 − F) = 1 − G; it is continuous at c/2 where both
    branches equal λc.
    """
    r_arr = np.asarray(r, dtype=float)
    _check_distance(r_arr)
    lam, c, mu = model.lam, model.c, model.mu
    inner = 2.0 * lam * r_arr
    outer = 1.0 - (1.0 - lam * c) * np.exp(-mu * np.maximum(2.0 * r_arr - c, 0.0))
    out = np.where(r_arr <= c / 2, inner, outer)
    return _as_output(out, r)


_CLOSED_FORMS = {
    SummaryKind.J: j_function,
    SummaryKind.K: k_function,
    SummaryKind.L: l_function,
    SummaryKind.G: nearest_neighbor_cdf,
    SummaryKind.F: contact_cdf,
    SummaryKind.PCF: pcf,
}


def summary_curve(model: HardcoreLaneModel, kind: SummaryKind | str, r_grid: np.ndarray) -> SummaryCurve:
    """Evaluate the closed form of ``kind`` on ``r_grid``."""
    kind = SummaryKind(kind)
    grid = np.asarray(r_grid, dtype=float)
    return SummaryCurve(grid, np.asarray(_CLOSED_FORMS[kind](model, grid), dtype=float), kind)
