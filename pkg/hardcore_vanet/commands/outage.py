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

"""hcvanet outage サブコマンドモジュール"""

from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import ConfigurationError
from ..export import write_outage_curve
from ..interference import OutageCurve, outage_multilane_hc, outage_multilane_ppp
from ._common import METHOD_CHOICES, AppContext, build_scenario, lanes_from_fits, parse_lanes, read_fits, resolve_link_lane


REPORT_DB = (-10.0, 0.0, 10.0, 20.0)


def _report(app: AppContext, curves: dict[str, OutageCurve]) -> None:
    first = next(iter(curves.values()))
    shown = [int(np.argmin(np.abs(first.theta_db - db))) for db in REPORT_DB]
    rows = [
        [f"{first.theta_db[i]:.1f}", *(f"{curve.p_out[i]:.4f}" for curve in curves.values())]
        for i in sorted(set(shown))
    ]
    app.ui.display_columns(rows, [">θ [dB]", *(f">{name}" for name in curves)], title="outage probability")


def run(
    app: AppContext,
    lanes: Optional[str],
    fits: Optional[Path],
    method: str,
    link_lane: Optional[int],
    eta: Optional[float],
    xi: Optional[float],
    g: Optional[float],
    ell: Optional[float],
    phi: Optional[float],
    theta_db: Optional[str],
    ppp: bool,
    fmt: Optional[str],
) -> dict[str, OutageCurve]:
    """ハードコアモデルと PPP の解析式で停止確率曲線を求めて書き出す

    PPP の曲線は各車線の強度 λ だけを使う。
    """

    if (lanes is None) == (fits is None):
        raise ConfigurationError("give exactly one of --lanes and --fits")
    if fits is not None:
        results = read_fits(fits)
        models = lanes_from_fits(results, METHOD_CHOICES[method])
        try:
            ppp_models = lanes_from_fits(results, METHOD_CHOICES["ppp"])
        except ConfigurationError:
            ppp_models = models
    else:
        assert lanes is not None
        models = ppp_models = parse_lanes(lanes)
    link = resolve_link_lane(link_lane, len(models))
    scenario, spacing = build_scenario(app, models, link, eta, xi, g, ell, phi, theta_db)

    curves: dict[str, OutageCurve] = {}
    with app.ui.open_spinner("integrating outage probabilities"):
        curves["hardcore"] = outage_multilane_hc(models, scenario, link, spacing)
        if ppp:
            curves["ppp"] = outage_multilane_ppp(ppp_models, scenario, link, spacing)

    out_format = app.output_format(fmt)
    directory = app.output_dir()
    for name, curve in curves.items():
        path = write_outage_curve(curve, directory / f"outage_{name}", out_format)
        app.ui.wrote(path)
    _report(app, curves)
    return curves
