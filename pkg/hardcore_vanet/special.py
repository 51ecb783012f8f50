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

"""解析式が必要とする特殊関数を定義するモジュール

整数次の正則化上側不完全ガンマ関数と、停止確率およびガードゾーンの式に現れる
2 つの Gauss 超幾何関数 ₂F₁ の族を提供する。
"""

from __future__ import annotations

import numpy as np
from scipy import special

from ._types import FloatArray
from .constants import HYP2F1_SWITCH
from .errors import DomainError


def regularized_upper_gamma(k: int | np.ndarray, x: float | np.ndarray) -> float | FloatArray:
    """Q(k, x) = Γ(k, x) / Γ(k) for integer k ≥ 1.

    For integer order Q(k, x) = e^{-x} Σ_{j<k} x^j / j!, i.e. the Poisson CDF at k − 1,
    which is what ``scipy.special.pdtr`` evaluates.
    """
    k_arr = np.asarray(k)
    x_arr = np.asarray(x, dtype=float)
    if np.any(k_arr < 1) or np.any(k_arr != np.floor(k_arr)):
        raise DomainError(f"order must be a positive integer, got {k!r}")
    if np.any(x_arr < 0) or np.any(np.isnan(x_arr)):
        raise DomainError(f"argument must be nonnegative, got {x!r}")
    value = special.pdtr(k_arr - 1, x_arr)
    return float(value) if np.ndim(value) == 0 else value


def _hyp2f1_unit_a(b: float, c: float, z: np.ndarray) -> np.ndarray:
    """₂F₁(1, b; c; z) for real z ≤ 0.

    Small |z| goes straight to the series. Beyond the switch point the Pfaff transformation
    ₂F₁(1, b; c; z) = (1 − z)^{-1} ₂F₁(1, c − b; c; z / (z − 1)) maps the argument into [0, 1).
    """
    out = np.empty_like(z)
    near = np.abs(z) < HYP2F1_SWITCH
    out[near] = special.hyp2f1(1.0, b, c, z[near])
    far = ~near
    if np.any(far):
        zf = z[far]
        out[far] = special.hyp2f1(1.0, c - b, c, zf / (zf - 1.0)) / (1.0 - zf)
    return out


def _check_eta(eta: float) -> None:
    if not eta > 1:
        raise DomainError(f"pathloss exponent must exceed 1, got {eta!r}")


def hyp2f1_outage(eta: float, theta: float | np.ndarray) -> float | FloatArray:
    """₂F₁(1, 1 − 1/η; 2 − 1/η; −θ), the own-lane PPP outage kernel."""
    _check_eta(eta)
    theta_arr = np.asarray(theta, dtype=float)
    if np.any(theta_arr < 0) or np.any(np.isnan(theta_arr)):
        raise DomainError(f"SIR threshold must be nonnegative, got {theta!r}")
    b = 1.0 - 1.0 / eta
    value = _hyp2f1_unit_a(b, b + 1.0, -np.atleast_1d(theta_arr)).reshape(theta_arr.shape)
    return float(value) if value.ndim == 0 else value


def hyp2f1_guardzone(eta: float, z: float | np.ndarray) -> float | FloatArray:
    """₂F₁(1, 1/η; 1 + 1/η; −z), the guard-zone kernel of t(r, r₀, θ)."""
    _check_eta(eta)
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < 0) or np.any(np.isnan(z_arr)):
        raise DomainError(f"argument must be nonnegative, got {z!r}")
    b = 1.0 / eta
    value = _hyp2f1_unit_a(b, b + 1.0, -np.atleast_1d(z_arr)).reshape(z_arr.shape)
    return float(value) if value.ndim == 0 else value


def pi_csc(eta: float) -> float:
    """(π/η) csc(π/η), the constant of the full-line PPP interference integral."""
    _check_eta(eta)
    x = np.pi / eta
    return float(x / np.sin(x))
