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

"""要約統計量・包絡線・停止確率の曲線を CSV / JSON に書き出し、読み戻すモジュール"""

from __future__ import annotations

import csv
import enum
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import TraceFormatError
from .hardcore import SummaryCurve
from .interference import OutageCurve, OutageProvenance
from .models.curves import EnvelopeJson, OutageCurveJson, SummaryCurveJson
from .models.manifest import RunManifest
from .spatial_stats import Envelope


class OutputFormat(str, enum.Enum):
    CSV = "csv"
    JSON = "json"


def _nullable(values: np.ndarray) -> list[Optional[float]]:
    return [None if math.isnan(v) else float(v) for v in values]


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _suffixed(path: Path | str, fmt: OutputFormat) -> Path:
    path = Path(path)
    return path if path.suffix else path.with_suffix(f".{fmt.value}")


def write_summary_curve(curve: SummaryCurve, path: Path | str, fmt: OutputFormat = OutputFormat.CSV) -> Path:
    path = _suffixed(path, fmt)
    if fmt is OutputFormat.JSON:
        doc = SummaryCurveJson(curve.kind.value, curve.r_grid.tolist(), _nullable(curve.values))
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(doc.to_json(indent=2), encoding="utf-8")  # type: ignore[attr-defined]
        return path
    return _write_csv(path, ("r_m", curve.kind.value), zip(curve.r_grid.tolist(), curve.values.tolist()))


def write_envelope(envelope: Envelope, path: Path | str, fmt: OutputFormat = OutputFormat.CSV) -> Path:
    path = _suffixed(path, fmt)
    if fmt is OutputFormat.JSON:
        doc = EnvelopeJson(
            envelope.kind.value,
            envelope.n_realizations,
            envelope.r_grid.tolist(),
            _nullable(envelope.lower),
            _nullable(envelope.upper),
        )
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(doc.to_json(indent=2), encoding="utf-8")  # type: ignore[attr-defined]
        return path
    rows = zip(envelope.r_grid.tolist(), envelope.lower.tolist(), envelope.upper.tolist())
    return _write_csv(path, ("r_m", "lower", "upper"), rows)


def write_outage_curve(
    curve: OutageCurve,
    path: Path | str,
    fmt: OutputFormat = OutputFormat.CSV,
    manifest: RunManifest | None = None,
) -> Path:
    """Columns theta_db, p_out and, for simulated curves, std_error.

    A manifest is embedded in JSON output and written next to a CSV as ``<stem>.manifest.json``.
    """
    path = _suffixed(path, fmt)
    std = None if curve.std_error is None else curve.std_error.tolist()
    if fmt is OutputFormat.JSON:
        doc = OutageCurveJson(
            curve.provenance.value,
            curve.theta_db.tolist(),
            curve.p_out.tolist(),
            std,
            None if manifest is None else manifest.to_dict(),  # type: ignore[attr-defined]
        )
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(doc.to_json(indent=2), encoding="utf-8")  # type: ignore[attr-defined]
        return path
    if std is None:
        _write_csv(path, ("theta_db", "p_out"), zip(curve.theta_db.tolist(), curve.p_out.tolist()))
    else:
        _write_csv(path, ("theta_db", "p_out", "std_error"), zip(curve.theta_db.tolist(), curve.p_out.tolist(), std))
    if manifest is not None:
        path.with_suffix(".manifest.json").write_text(manifest.to_json(indent=2), encoding="utf-8")  # type: ignore[attr-defined]
    return path


def read_outage_curve(path: Path | str, provenance: OutageProvenance | None = None) -> OutageCurve:
    """Load a curve written by :func:`write_outage_curve`.

    CSV files carry no provenance; it is MONTE_CARLO when a std_error column is present and
    ``provenance`` (default HC_ANALYTIC) otherwise.
    """
    path = Path(path)
    if path.suffix == ".json":
        doc = OutageCurveJson.from_json(path.read_text(encoding="utf-8"))  # type: ignore[attr-defined]
        return OutageCurve(
            10.0 ** (np.asarray(doc.theta_db) / 10.0),
            np.asarray(doc.p_out),
            OutageProvenance(doc.provenance),
            None if doc.std_error is None else np.asarray(doc.std_error),
        )
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or header[:2] != ["theta_db", "p_out"]:
            raise TraceFormatError(f"{path} is not an outage curve", line=1)
        try:
            rows = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
        except ValueError as e:
            raise TraceFormatError(f"{path}: {e}") from e
    if rows.size == 0:
        raise TraceFormatError(f"{path} holds no rows", line=2)
    has_error = len(header) > 2
    if has_error:
        provenance = OutageProvenance.MONTE_CARLO
    return OutageCurve(
        10.0 ** (rows[:, 0] / 10.0),
        rows[:, 1],
        provenance or OutageProvenance.HC_ANALYTIC,
        rows[:, 2] if has_error else None,
    )
