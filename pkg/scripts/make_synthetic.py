#!/usr/bin/env python3
"""Regenerate the bundled example datasets under data/.

Both files span 1967-2017 (51 annual rows) with eight predictor columns and
a `steel` target, mirroring the kind of macro panel the toolkit is built
for. Values are synthetic and dimensionless.

synthetic.csv        predictors integrate drift + AR(1) shocks, so every
                     column carries a unit root and becomes cleanly
                     stationary after one differencing pass; target = fixed
                     weighted combination of the predictors plus small
                     Gaussian noise. Seeded SplitMix64(217); the seed and
                     shock coefficient were chosen so all nine columns sit
                     well clear of the 5% ADF decision threshold on both
                     sides (level p >= 0.20, differenced p <= 0.025).
noiseless_linear.csv exact straight-line predictors and an exact affine
                     target; exercises the structural properties of the
                     pipeline (constant year-over-year forecast increments).

Run from anywhere: paths resolve relative to the repository root.
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from steelcast.rng import SplitMix64  # noqa: E402

SEED = 217
YEARS = list(range(1967, 2018))

# name -> (starting level, annual drift, shock scale)
PREDICTORS = {
    "gdp": (2000.0, 40.0, 25.0),
    "gdp_per_capita": (300.0, 4.0, 3.0),
    "manufacturing": (500.0, 12.0, 8.0),
    "industry": (800.0, 16.0, 12.0),
    "oil_production": (900.0, 10.0, 20.0),
    "energy_production": (600.0, 14.0, 10.0),
    "rail_lines": (5000.0, 60.0, 30.0),
    "urban_population": (10000.0, 150.0, 40.0),
}

# target = intercept + sum(weight * predictor) + noise
TARGET_INTERCEPT = 2.0
TARGET_NOISE = 0.05
WEIGHTS = {
    "gdp": 0.0020,
    "gdp_per_capita": 0.0080,
    "manufacturing": 0.0050,
    "industry": 0.0030,
    "oil_production": 0.0015,
    "energy_production": 0.0030,
    "rail_lines": 0.0006,
    "urban_population": 0.0003,
}


INCREMENT_AR = -0.7  # negative autocorrelation makes first differences
                     # decisively stationary at the 51-point sample size


def build_noisy() -> dict[str, list[float]]:
    rng = SplitMix64(SEED)
    columns: dict[str, list[float]] = {}
    for name, (base, drift, scale) in PREDICTORS.items():
        level = base
        shock = 0.0
        values = []
        for _ in YEARS:
            values.append(level)
            shock = INCREMENT_AR * shock + rng.normal()
            level += drift + scale * shock
        columns[name] = values
    steel = []
    for i, _ in enumerate(YEARS):
        v = TARGET_INTERCEPT + sum(WEIGHTS[n] * columns[n][i] for n in PREDICTORS)
        steel.append(v + TARGET_NOISE * rng.normal())
    return {"steel": steel, **columns}


def build_noiseless() -> dict[str, list[float]]:
    columns = {
        name: [base + drift * t for t in range(len(YEARS))]
        for name, (base, drift, _) in PREDICTORS.items()
    }
    steel = [
        TARGET_INTERCEPT + sum(WEIGHTS[n] * columns[n][t] for n in PREDICTORS)
        for t in range(len(YEARS))
    ]
    return {"steel": steel, **columns}


def write_csv(path: Path, columns: dict[str, list[float]]) -> None:
    names = list(columns)
    lines = [",".join(["year"] + names)]
    for i, year in enumerate(YEARS):
        lines.append(",".join([str(year)] + [repr(columns[n][i]) for n in names]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {path} ({len(YEARS)} rows x {len(names)} columns)")


def main() -> None:
    data_dir = ROOT / "data"
    data_dir.mkdir(exist_ok=True)
    write_csv(data_dir / "synthetic.csv", build_noisy())
    write_csv(data_dir / "noiseless_linear.csv", build_noiseless())


if __name__ == "__main__":
    main()
