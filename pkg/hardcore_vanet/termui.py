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

"""rich を使った端末出力 (表・スピナー・進捗・判定・メッセージ) を定義するモジュール

標準出力には結果 (表や書き出したファイル) を、標準エラーには状態表示とメッセージを出す。
"""

from __future__ import annotations

import enum
import os
import warnings
from pathlib import Path
from typing import TYPE_CHECKING

import rich
from rich.box import ROUNDED
from rich.console import Console
from rich.markup import escape
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table
from rich.theme import Theme


if TYPE_CHECKING:
    from typing import Any, Sequence

    from ._types import RichProtocol, Spinner, SpinnerT


DEFAULT_THEME = {
    "primary": "cyan",
    "success": "green",
    "warning": "yellow",
    "error": "red",
    "info": "blue",
    "path": "bold",
}

_error_console = Console(stderr=True, theme=Theme(DEFAULT_THEME))


def _is_interactive(console: Console | None = None) -> bool:
    """Interactive unless HCVANET_NON_INTERACTIVE is set or the console is not a terminal"""
    if console is None:
        console = rich.get_console()
    return "HCVANET_NON_INTERACTIVE" not in os.environ and console.is_interactive


class Verbosity(enum.IntEnum):
    QUIET = -1
    NORMAL = 0
    DETAIL = 1
    DEBUG = 2


class Emoji:
    # legacy Windows consoles cannot render the check marks
    if rich.get_console().legacy_windows:
        SUCCESS = "v"
        FAIL = "x"
        SPINNER = "line"
    else:
        SUCCESS = ":heavy_check_mark:"
        FAIL = ":heavy_multiplication_x:"
        SPINNER = "dots"


class _PlainStatus:
    """Spinner stand-in for non-interactive runs: prints each status once, or nothing when silent."""

    def __init__(self, text: str, silent: bool = False) -> None:
        self.text = text
        self.silent = silent

    def _show(self) -> None:
        if not self.silent:
            _error_console.print(f"[primary]STATUS:[/] {self.text}")

    def update(self, text: str) -> None:
        self.text = text
        self._show()

    def __enter__(self: SpinnerT) -> SpinnerT:
        self._show()  # type: ignore[attr-defined]
        return self

    def __exit__(self, *args: Any) -> None:
        pass


class UI:
    """Terminal UI object"""

    def __init__(self, verbosity: Verbosity = Verbosity.NORMAL) -> None:
        self.verbosity = verbosity

    def set_verbosity(self, verbosity: int) -> None:
        self.verbosity = Verbosity(max(min(verbosity, Verbosity.DEBUG), Verbosity.QUIET))
        if self.verbosity == Verbosity.QUIET:
            # overflow and invalid-value warnings of the numerics
            warnings.simplefilter("ignore", RuntimeWarning)

    def set_theme(self, theme: Theme) -> None:
        rich.get_console().push_theme(theme)
        _error_console.push_theme(theme)

    def echo(
        self,
        message: str | RichProtocol = "",
        err: bool = False,
        verbosity: Verbosity = Verbosity.QUIET,
        **kwargs: Any,
    ) -> None:
        """print message using rich console."""
        if self.verbosity >= verbosity:
            console = _error_console if err else rich.get_console()
            if not console.is_interactive:
                kwargs.setdefault("crop", False)
                kwargs.setdefault("overflow", "ignore")
            console.print(message, **kwargs)

    def display_columns(
        self,
        rows: Sequence[Sequence[str]],
        header: list[str],
        title: str | None = None,
    ) -> None:
        """Print rows as a table; a header starting with ``^`` is centered, with ``>`` right-aligned."""
        table = Table(box=ROUNDED, title=title)
        for name in header:
            justify = {"^": "center", ">": "right"}.get(name[0], "left")
            table.add_column(name.lstrip("^>"), justify=justify)  # type: ignore[arg-type]
        for row in rows:
            table.add_row(*row)
        self.echo(table)

    @staticmethod
    def verdict(passed: bool, details: str = "") -> tuple[str, str]:
        """(mark, details) cells of a pass/fail row, colored by the outcome"""
        style = "success" if passed else "error"
        mark = Emoji.SUCCESS if passed else Emoji.FAIL
        return f"[{style}]{mark}[/]", f"[{style}]{details}[/]" if details else ""

    def wrote(self, path: Path, details: str = "") -> None:
        """Report a written result file on standard output."""
        suffix = f" ({details})" if details else ""
        self.echo(f"wrote [path]{escape(str(path))}[/]{suffix}", soft_wrap=True)

    def open_spinner(self, title: str) -> Spinner:
        """Open a spinner as a context manager."""
        if self.verbosity == Verbosity.QUIET:
            return _PlainStatus(title, silent=True)
        if self.verbosity >= Verbosity.DETAIL or not _is_interactive():
            return _PlainStatus(title)
        return _error_console.status(title, spinner=Emoji.SPINNER, spinner_style="primary")  # type: ignore[return-value]

    def make_progress(self, **kwargs: Any) -> Progress:
        """Progress bar with description, count and elapsed time; disabled when quiet or piped."""
        return Progress(
            TextColumn("{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            console=_error_console,
            disable=self.verbosity == Verbosity.QUIET or not _is_interactive(),
            **kwargs,
        )

    def info(self, message: str, verbosity: Verbosity = Verbosity.NORMAL) -> None:
        self.echo(f"[info]INFO:[/] [dim]{message}[/]", err=True, verbosity=verbosity)

    def error(self, message: str, verbosity: Verbosity = Verbosity.QUIET) -> None:
        self.echo(f"[error]ERROR:[/] {message}", err=True, verbosity=verbosity)
