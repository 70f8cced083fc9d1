"""Command-line interface: CSV in, JSON/CSV reports out.

Subcommands map one-to-one onto the analyses: `iou` (log-log consumption vs
output fit), `correlate` (three correlation tests per predictor),
`stationarity` (ADF + KPSS before/after differencing), `tune` (cost grid
search), `train` (70/30 split fit with metrics), `forecast` (multi-year
levels), and `pipeline` (all of the above in order).

Report files are JSON with a `schema_version` field (see README for the
field-by-field schema); plot-style data is emitted as two-column CSV.
Identical (input, configuration, seed) produce byte-identical outputs.

Exit codes: 0 success, 2 usage/configuration error, 3 data error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    DataError,
    FrequencyError,
    NumericalError,
    ParseError,
    SchemaError,
    SteelcastError,
)
from .evaluation import (
    DEFAULT_C_GRID,
    CvSpec,
    SplitSpec,
    compute_metrics,
    split_indices,
    tune_c,
)
from .forecast import ForecastConfig, choose_diff_order, forecast, prepare
from .iou import fit_iou
from .series import Panel, difference
from .stattests import adf_test, kendall_test, kpss_test, pearson_test, spearman_test
from .svm import Kernel, SvmProblem, decision, train_svr

SCHEMA_VERSION = 1
SEED_ENV_VAR = "STEELCAST_SEED"


@dataclass(frozen=True)
class RunConfig:
    input_path: str
    target_column: str | None
    kernel: str
    sigma_squared: float | None
    epsilon: float
    c_grid: tuple[float, ...]
    folds: int
    repeats: int
    train_fraction: float
    seed: int
    horizon: int
    max_diff: int
    output_dir: str
    output_column: str = "gdp"
    adf_lag: int | None = None
    kpss_lag: int | None = None

    def __post_init__(self):
        if self.kernel not in ("linear", "rbf"):
            raise ConfigError(f"kernel must be linear or rbf, got {self.kernel!r}")
        if self.sigma_squared is not None and not self.sigma_squared > 0:
            raise ConfigError("sigma-squared must be positive")
        if self.epsilon < 0:
            raise ConfigError("epsilon must be non-negative")
        if not self.c_grid:
            raise ConfigError("c-grid must contain at least one value")
        if any(not c > 0 for c in self.c_grid):
            raise ConfigError("c-grid values must be positive")
        if self.folds < 2:
            raise ConfigError("folds must be at least 2")
        if self.repeats < 1:
            raise ConfigError("repeats must be at least 1")
        if not (0.0 < self.train_fraction < 1.0):
            raise ConfigError("train-fraction must lie strictly between 0 and 1")
        if self.horizon < 1:
            raise ConfigError("horizon must be at least 1")
        if not 0 <= self.max_diff <= 2:
            raise ConfigError("max-diff must be 0, 1 or 2")


def ingest_csv(path, target: str | None = None) -> Panel:
    """Read an annual panel: header `year,<name>,...`, strictly consecutive
    years, every cell a finite decimal."""
    p = Path(path)
    if not p.is_file():
        raise SchemaError(f"input file not found: {p}")
    with open(p, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError("input file is empty")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "year":
        raise SchemaError("first header cell must be 'year'")
    names = header[1:]
    if not names:
        raise SchemaError("need at least one series column besides 'year'")
    if len(set(names)) != len(names):
        dup = sorted({n for n in names if names.count(n) > 1})
        raise SchemaError(f"duplicate column names: {dup}")

    years: list[int] = []
    data: list[list[float]] = [[] for _ in names]
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(f"row {r} has {len(row)} cells, expected {len(header)}")
        try:
            year = int(row[0].strip())
        except ValueError:
            raise ParseError(f"row {r}: year {row[0]!r} is not an integer") from None
        years.append(year)
        for j, cell in enumerate(row[1:]):
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(
                    f"row {r}, column {names[j]!r}: cell {cell!r} is not numeric"
                ) from None
            if not math.isfinite(value):
                raise ParseError(f"row {r}, column {names[j]!r}: non-finite value {cell!r}")
            data[j].append(value)
    if not years:
        raise SchemaError("no data rows")
    for k in range(1, len(years)):
        if years[k] != years[k - 1] + 1:
            raise FrequencyError(
                f"years must be consecutive: {years[k - 1]} is followed by {years[k]}"
            )

    target_name = target if target is not None else names[0]
    if target_name not in names:
        raise SchemaError(f"target column {target_name!r} not in the file")
    return Panel(years[0], {n: tuple(v) for n, v in zip(names, data)}, target_name)


# ---------------------------------------------------------------------------
# report helpers

def _write_json(out_dir: Path, name: str, payload: dict) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    path = out_dir / name
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path

def _write_csv(out_dir: Path, name: str, header: list[str], rows) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _corr_record(res) -> dict:
    return {
        "coefficient": res.coefficient,
        "statistic": res.statistic,
        "p_value": res.p_value,
    }


def _stationarity_record(res) -> dict:
    return {
        "lag": res.lag,
        "statistic": res.statistic,
        "p_value": res.p_value,
        "p_clamped": res.p_clamped,
        "stationary_at_5pct": res.stationary_at_5pct,
    }


def _resolved_kernel(cfg: RunConfig, n_features: int) -> Kernel:
    if cfg.kernel == "linear":
        return Kernel("linear")
    sigma = cfg.sigma_squared if cfg.sigma_squared is not None else float(n_features)
    return Kernel("rbf", sigma)


def _require_predictors(panel: Panel, command: str) -> None:
    if len(panel.predictor_names) < 1:
        raise SchemaError(f"{command} needs at least 2 data columns (target plus predictors)")


# ---------------------------------------------------------------------------
# subcommands

def _cmd_iou(panel: Panel, cfg: RunConfig, out_dir: Path) -> list[Path]:
    if cfg.output_column not in panel.columns:
        raise SchemaError(f"output column {cfg.output_column!r} not in the file")
    if cfg.output_column == panel.target_name:
        raise ConfigError("target and output columns must differ")
    fit = fit_iou(panel.target(), panel.series(cfg.output_column))
    d = fit.diagnostics
    payload = {
        "command": "iou",
        "target": panel.target_name,
        "output_column": cfg.output_column,
        "start_year": panel.start_year,
        "end_year": panel.end_year,
        "n": d.n,
        "elasticity": fit.elasticity,
        "log_scale": fit.log_scale,
        "rse": d.rse,
        "r_squared": d.r_squared,
        "adj_r_squared": d.adj_r_squared,
        "f_p_value": d.f_p_value,
    }
    path = _write_json(out_dir, "iou.json", payload)
    print(
        f"iou: elasticity={fit.elasticity:.4f} r_squared={d.r_squared:.4f} -> {path}"
    )
    return [path]


def _cmd_correlate(panel: Panel, cfg: RunConfig, out_dir: Path) -> list[Path]:
    _require_predictors(panel, "correlate")
    target = np.asarray(panel.columns[panel.target_name])
    results = []
    for name in panel.predictor_names:
        x = np.asarray(panel.columns[name])
        results.append(
            {
                "series": name,
                "pearson": _corr_record(pearson_test(x, target)),
                "kendall": _corr_record(kendall_test(x, target)),
                "spearman": _corr_record(spearman_test(x, target)),
            }
        )
    payload = {
        "command": "correlate",
        "target": panel.target_name,
        "n": panel.n_rows,
        "results": results,
    }
    path = _write_json(out_dir, "correlate.json", payload)
    print(f"correlate: {len(results)} series vs {panel.target_name!r} -> {path}")
    return [path]


def _cmd_stationarity(panel: Panel, cfg: RunConfig, out_dir: Path) -> list[Path]:
    columns = []
    for name in panel.names:
        series = panel.series(name)
        order, confirmed = choose_diff_order(series, cfg.max_diff)
        level = {
            "adf": _stationarity_record(adf_test(series, cfg.adf_lag)),
            "kpss": _stationarity_record(kpss_test(series, cfg.kpss_lag)),
        }
        diffed, _ = difference(series, order)
        after = {
            "adf": _stationarity_record(adf_test(diffed, cfg.adf_lag)),
            "kpss": _stationarity_record(kpss_test(diffed, cfg.kpss_lag)),
        }
        columns.append(
            {
                "series": name,
                "chosen_order": order,
                "order_confirmed": confirmed,
                "level": level,
                "differenced": after,
            }
        )
    payload = {"command": "stationarity", "max_diff": cfg.max_diff, "columns": columns}
    path = _write_json(out_dir, "stationarity.json", payload)
    print(f"stationarity: {len(columns)} columns -> {path}")
    return [path]


def _cmd_tune(panel: Panel, cfg: RunConfig, out_dir: Path) -> list[Path]:
    _require_predictors(panel, "tune")
    tpanel, _ = prepare(panel, cfg.max_diff)
    kernel = _resolved_kernel(cfg, len(tpanel.predictor_names))
    spec = CvSpec(folds=min(cfg.folds, tpanel.n_rows), repeats=cfg.repeats, seed=cfg.seed)
    result = tune_c(tpanel, cfg.c_grid, kernel, cfg.epsilon, spec)
    payload = {
        "command": "tune",
        "kernel": cfg.kernel,
        "epsilon": cfg.epsilon,
        "folds": spec.folds,
        "repeats": spec.repeats,
        "seed": cfg.seed,
        "grid": [
            {"c": c, "mean_rmse": mean, "sd_rmse": sd} for c, mean, sd in result.grid
        ],
        "best_c": result.best_c,
    }
    path = _write_json(out_dir, "tune.json", payload)
    curve = _write_csv(
        out_dir,
        "tune_curve.csv",
        ["c", "mean_rmse"],
        [(c, mean) for c, mean, _ in result.grid],
    )
    print(f"tune: best_c={result.best_c} -> {path}")
    return [path, curve]


def _cmd_train(panel: Panel, cfg: RunConfig, out_dir: Path) -> list[Path]:
    _require_predictors(panel, "train")
    tpanel, _ = prepare(panel, cfg.max_diff)
    kernel = _resolved_kernel(cfg, len(tpanel.predictor_names))

    train_idx, test_idx = split_indices(tpanel.n_rows, SplitSpec(cfg.train_fraction, cfg.seed))
    x = np.column_stack([tpanel.columns[n] for n in tpanel.predictor_names])
    y = np.asarray(tpanel.columns[tpanel.target_name])

    train_panel = Panel(
        tpanel.start_year,
        {n: tuple(v[i] for i in train_idx) for n, v in tpanel.columns.items()},
        tpanel.target_name,
    )
    folds = min(cfg.folds, len(train_idx))
    spec = CvSpec(folds=folds, repeats=cfg.repeats, seed=cfg.seed)
    tuned = tune_c(train_panel, cfg.c_grid, kernel, cfg.epsilon, spec)
    best_row = next(row for row in tuned.grid if row[0] == tuned.best_c)

    model = train_svr(
        SvmProblem(x=x[train_idx], y=y[train_idx], c=tuned.best_c, epsilon=cfg.epsilon),
        kernel,
    )
    train_pred = np.atleast_1d(decision(model, x[train_idx]))
    test_pred = np.atleast_1d(decision(model, x[test_idx]))
    train_metrics = compute_metrics(y[train_idx], train_pred)
    test_metrics = compute_metrics(y[test_idx], test_pred)

    def _metrics_record(m) -> dict:
        return {"rmse": m.rmse, "mae": m.mae, "r_squared": m.r_squared}

    payload = {
        "command": "train",
        "kernel": cfg.kernel,
        "epsilon": cfg.epsilon,
        "seed": cfg.seed,
        "train_fraction": cfg.train_fraction,
        "best_c": tuned.best_c,
        "cv": {"mean_rmse": best_row[1], "sd_rmse": best_row[2]},
        "n_train": len(train_idx),
        "n_test": len(test_idx),
        "train": _metrics_record(train_metrics),
        "test": _metrics_record(test_metrics),
    }
    path = _write_json(out_dir, "train.json", payload)
    rows = sorted(
        (tpanel.start_year + i, float(y[i]), float(p))
        for i, p in zip(test_idx, test_pred)
    )
    fig13 = _write_csv(out_dir, "test_predictions.csv", ["year", "actual", "predicted"], rows)
    print(
        f"train: best_c={tuned.best_c} train_rmse={train_metrics.rmse:.4f} "
        f"test_rmse={test_metrics.rmse:.4f} -> {path}"
    )
    return [path, fig13]


def _cmd_forecast(panel: Panel, cfg: RunConfig, out_dir: Path) -> list[Path]:
    _require_predictors(panel, "forecast")
    kernel = _resolved_kernel(cfg, len(panel.predictor_names))
    config = ForecastConfig(
        kernel=kernel,
        epsilon=cfg.epsilon,
        c_grid=cfg.c_grid,
        folds=cfg.folds,
        repeats=cfg.repeats,
        seed=cfg.seed,
        max_diff=cfg.max_diff,
    )
    report, state = forecast(panel, cfg.horizon, config)
    payload = {
        "command": "forecast",
        "target": panel.target_name,
        "kernel": cfg.kernel,
        "epsilon": cfg.epsilon,
        "c": state.c,
        "seed": cfg.seed,
        "horizon": report.horizon,
        "unit": report.unit,
        "years": list(report.years),
        "levels": list(report.levels),
        "orders": {name: tr.order for name, tr in sorted(state.transforms.items())},
        "warnings": list(state.warnings),
    }
    path = _write_json(out_dir, "forecast.json", payload)
    table = _write_csv(
        out_dir, "forecast.csv", ["year", "level"], list(zip(report.years, report.levels))
    )
    print(
        f"forecast: {report.years[0]}..{report.years[-1]} "
        f"first={report.levels[0]:.3f} last={report.levels[-1]:.3f} -> {path}"
    )
    return [path, table]


def _cmd_pipeline(panel: Panel, cfg: RunConfig, out_dir: Path) -> list[Path]:
    written = []
    written += _cmd_iou(panel, cfg, out_dir)
    written += _cmd_correlate(panel, cfg, out_dir)
    written += _cmd_stationarity(panel, cfg, out_dir)
    written += _cmd_tune(panel, cfg, out_dir)
    written += _cmd_train(panel, cfg, out_dir)
    written += _cmd_forecast(panel, cfg, out_dir)
    manifest = {
        "command": "pipeline",
        "target": panel.target_name,
        "seed": cfg.seed,
        "reports": sorted(p.name for p in written),
    }
    written.append(_write_json(out_dir, "pipeline.json", manifest))
    print(f"pipeline: wrote {len(written)} files under {out_dir}")
    return written


_COMMANDS = {
    "iou": _cmd_iou,
    "correlate": _cmd_correlate,
    "stationarity": _cmd_stationarity,
    "tune": _cmd_tune,
    "train": _cmd_train,
    "forecast": _cmd_forecast,
    "pipeline": _cmd_pipeline,
}


# ---------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # single-line machine-parseable diagnostics
        print(f"error: UsageError: {message}", file=sys.stderr)
        raise SystemExit(2)


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None


def _parse_c_grid(raw: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"cannot parse c-grid {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="steelcast", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} analysis")
        p.add_argument("input", help="CSV file: header 'year,<series>,...'")
        p.add_argument("--target", default=None, help="target column (default: first data column)")
        p.add_argument("--output-column", default="gdp", help="output (denominator) column for iou")
        p.add_argument("--kernel", default="linear", choices=("linear", "rbf"))
        p.add_argument("--sigma-squared", type=float, default=None,
                       help="rbf width parameter (default: number of predictors)")
        p.add_argument("--epsilon", type=float, default=0.1, help="SVR tube half-width")
        p.add_argument("--c-grid", default=",".join(str(c) for c in DEFAULT_C_GRID),
                       help="comma-separated cost grid")
        p.add_argument("--folds", type=int, default=10)
        p.add_argument("--repeats", type=int, default=3)
        p.add_argument("--train-fraction", type=float, default=0.7)
        p.add_argument("--seed", type=int, default=None,
                       help=f"PRNG seed (default: ${SEED_ENV_VAR} or 0)")
        p.add_argument("--horizon", type=int, default=10)
        p.add_argument("--max-diff", type=int, default=2)
        p.add_argument("--adf-lag", type=int, default=None,
                       help="override the ADF lag (default: floor((n-1)^(1/3)))")
        p.add_argument("--kpss-lag", type=int, default=None,
                       help="override the KPSS lag (default: floor(4*(n/100)^0.25))")
        p.add_argument("--out", default="reports", help="report directory")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        input_path=args.input,
        target_column=args.target,
        kernel=args.kernel,
        sigma_squared=args.sigma_squared,
        epsilon=args.epsilon,
        c_grid=_parse_c_grid(args.c_grid) if isinstance(args.c_grid, str) else tuple(args.c_grid),
        folds=args.folds,
        repeats=args.repeats,
        train_fraction=args.train_fraction,
        seed=args.seed if args.seed is not None else _default_seed(),
        horizon=args.horizon,
        max_diff=args.max_diff,
        output_dir=args.out,
        output_column=args.output_column,
        adf_lag=args.adf_lag,
        kpss_lag=args.kpss_lag,
    )


def run_command(name: str, config: RunConfig) -> int:
    """Execute one subcommand; returns the process exit code."""
    try:
        panel = ingest_csv(config.input_path, config.target_column)
        _COMMANDS[name](panel, config, Path(config.output_dir))
    except SteelcastError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        if isinstance(exc, ConfigError):
            return 2
        if isinstance(exc, NumericalError):
            return 4
        if isinstance(exc, DataError):
            return 3
        return 1
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except ConfigError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return run_command(args.command, config)


if __name__ == "__main__":
    sys.exit(main())
