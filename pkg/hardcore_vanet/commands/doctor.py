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

"""hcvanet doctor サブコマンドモジュール"""

import os
import sys
import time
from contextlib import contextmanager, nullcontext
from importlib import metadata
from pathlib import Path
from typing import Generator

import rich
from packaging import version
from rich.live import Live
from rich.table import Table

from ..errors import ConfigurationError
from ..models.config import load_config
from ..paths import HCVANET_CONFIG_JSON
from ..status import ExitStatus
from ..termui import UI, Emoji
from ._common import AppContext


Check = list[str]

REQUIRED_PACKAGES: dict[str, str] = {
    "numpy": "1.26",
    "scipy": "1.11",
    "click": "8.1.7",
    "rich": "13.9.4",
    "dataclasses-json": "0.6.7",
}

BEAT_TIME = 0.04


def _passed(target: str, condition: str, details: str = "") -> Check:
    return [target, condition, *UI.verdict(True, details)]


def _failed(target: str, condition: str, details: str = "") -> Check:
    return [target, condition, *UI.verdict(False, details)]


def python_satisfied(required: str = "3.11") -> Check:
    """実行中の Python がバージョン要件を満たしているかをテストする"""

    current = ".".join(str(v) for v in sys.version_info[:3])
    if version.parse(current) >= version.parse(required):
        return _passed("python", "バージョン要件を満たしているか", f"{current} >={required}")
    return _failed("python", "バージョン要件を満たしているか", f"{current} >={required}")


def package_satisfied(package: str, required: str) -> Check:
    """インストール済みのパッケージがバージョン要件を満たしているかをテストする"""

    try:
        current = metadata.version(package)
    except metadata.PackageNotFoundError:
        return _failed(package, "インストール済か", "not installed")
    if version.parse(current) >= version.parse(required):
        return _passed(package, "バージョン要件を満たしているか", f"{current} >={required}")
    return _failed(package, "バージョン要件を満たしているか", f"{current} >={required}")


def check_config_file(path: Path) -> Check:
    """設定ファイルが読み込めるかをテストする (存在しない場合は既定値を使う)"""

    if not path.exists():
        return _passed("config", "設定ファイルが有効か", f"{path} がないため既定値を使用")
    try:
        load_config(path)
    except ConfigurationError as e:
        return _failed("config", "設定ファイルが有効か", str(e))
    return _passed("config", "設定ファイルが有効か", str(path))


def check_output_directory(directory: Path) -> Check:
    """出力先ディレクトリに書き込めるかをテストする"""

    target = directory
    while not target.exists() and target != target.parent:
        target = target.parent
    if os.access(target, os.W_OK):
        return _passed("output", "出力先に書き込めるか", str(directory.absolute()))
    return _failed("output", "出力先に書き込めるか", f"{directory.absolute()} は書き込み不可")


@contextmanager
def beat(length: int = 1) -> Generator[None, None, None]:
    yield
    time.sleep(length * BEAT_TIME)


def run(app: AppContext) -> ExitStatus:
    """数値計算ライブラリのバージョンや設定ファイル、出力先をテストする"""

    config_path = app.config_path or HCVANET_CONFIG_JSON

    console = rich.get_console()

    table = Table(title="Doctor result")
    table.add_column("Target", no_wrap=True)
    table.add_column("Condition", no_wrap=True)
    table.add_column("Result", no_wrap=True)
    table.add_column("Details", no_wrap=True)

    table.box = rich.box.SIMPLE_HEAD
    table.pad_edge = False

    checks = [
        python_satisfied,
        *(lambda p=p, r=r: package_satisfied(p, r) for p, r in REQUIRED_PACKAGES.items()),
        lambda: check_config_file(config_path),
        lambda: check_output_directory(Path(app.config.output.directory)),
    ]
    failed = False
    live = Live(table, console=console, screen=False, refresh_per_second=15) if console.is_terminal else nullcontext()
    with live:
        for check in checks:
            with beat(2 if console.is_terminal else 0):
                row = check()
                failed |= Emoji.FAIL in row[2]
                table.add_row(*row)
    if not console.is_terminal:
        app.ui.echo(table)
    return ExitStatus.ERROR if failed else ExitStatus.SUCCESS
