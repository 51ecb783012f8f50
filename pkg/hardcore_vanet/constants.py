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

"""利用または参照する定数を定義するモジュール"""

import math


LAMBDA_C_CEILING: float = 1.0 - 1e-9
"""λc の上限。これを超えるモデルは格子に退化するため構築時に拒否する"""

COUPLING_TOLERANCE: float = 1e-12
"""λ(1+μc) = μ の結合条件の許容誤差"""

QUAD_ABS_TOL: float = 1e-8
"""停止確率の積分で用いる絶対許容誤差"""

QUAD_REL_TOL: float = 1e-10
"""停止確率の積分で用いる相対許容誤差"""

QUAD_LIMIT: int = 400
"""適応求積の最大分割数"""

J_UNDEFINED_GUARD: float = 1e-6
"""1 − F̂ がこれを下回る距離では Ĵ を未定義 (NaN) とする"""

R_MAX_J: float = 80.0
"""J 関数の既定の最大距離 [m]"""

R_MAX_L: float = 500.0
"""L 関数の既定の最大距離 [m]"""

R_STEP: float = 1.0
"""要約統計量の既定の距離刻み [m]"""

N_PROBES: int = 10_000
"""接触分布 F̂ の推定に使うプローブ数"""

MIN_EXPECTED_POINTS: int = 20
"""観測区間に期待される点数がこれ未満なら警告する"""

LSQ_BINS: int = 200
"""最小二乗推定で経験 CDF を評価するビン数"""

LSQ_UPPER_PERCENTILE: float = 99.5
"""最小二乗推定のビン範囲の上限パーセンタイル"""

LSQ_MAX_ITERATIONS: int = 10_000
"""最小二乗推定の反復上限"""

LSQ_STEP_TOLERANCE: float = 1e-8
"""最小二乗推定の収束判定 (相対ステップ幅)"""

THETA_DB_RANGE: tuple[float, float, int] = (-10.0, 20.0, 61)
"""SIR 閾値グリッドの既定値 (下限 dB, 上限 dB, 点数)"""

HYP2F1_SWITCH: float = 0.9
"""₂F₁ を級数で評価する |z| の上限。これ以上は線形変換を使う"""

MC_RUNS: int = 100_000
"""モンテカルロ試行回数の既定値"""

MC_ROADWAY_LENGTH: float = 10_000.0
"""モンテカルロで受信機の前後それぞれに生成する道路長 [m]"""

MC_CHUNK_SIZE: int = 4_096
"""モンテカルロの 1 シャードあたりの試行数。ワーカー数に依存しない"""

MC_TRUNCATION_BOUND: float = 1e-4
"""道路端以遠の干渉の上界が平均干渉に占める割合の上限"""

GUARD_ZONE_PHI_MAX: float = math.pi
"""ビーム幅 φ の上限 (開区間)"""

GUARD_ZONE_DEFAULTS: tuple[float, float] = (6.0, math.pi / 20)
"""ガードゾーンの既定値 (車線間隔 ℓ [m], ビーム幅 φ [rad])"""

DEFAULT_DROP_FIRST: int = 600
"""トレース読み込み時に捨てる先頭スナップショット数 (車両が道路全体に行き渡るまでの区間)"""
