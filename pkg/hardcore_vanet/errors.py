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

"""パッケージ全体で送出する例外を定義するモジュール

入力起因のエラーは ValueError を、数値計算の失敗は NumericError を継承する。
CLI はこの区別で終了コードを決める。
"""

from __future__ import annotations

from typing import Any


class HardcoreVanetError(Exception):
    """Base class of every error raised by this package."""


class InvalidModelError(HardcoreVanetError, ValueError):
    """Lane parameters violate the hardcore model constraints."""


class DomainError(HardcoreVanetError, ValueError):
    """An argument lies outside the domain of a numeric routine."""


class WindowError(HardcoreVanetError, ValueError):
    """Observation window is empty or too narrow for the requested statistic."""


class InsufficientDataError(HardcoreVanetError, ValueError):
    """Too few points or gaps to estimate anything."""


class TraceFormatError(HardcoreVanetError, ValueError):
    """A trace file could not be parsed."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigurationError(HardcoreVanetError, ValueError):
    """Invalid scenario, simulation or user configuration."""


class NumericError(HardcoreVanetError):
    """A numeric procedure failed to produce a trustworthy result."""


class QuadratureError(NumericError):
    """Adaptive quadrature did not reach the requested tolerance."""


class FittingError(NumericError):
    """A parameter estimator failed; ``best`` holds the last iterate when there is one."""

    def __init__(self, message: str, best: Any = None) -> None:
        super().__init__(message)
        self.best = best
