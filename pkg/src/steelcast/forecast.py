"""End-to-end forecasting pipeline.

prepare() makes every panel column stationary by differencing (minimal order
whose ADF p-value drops below 0.05, capped), then standardizes. forecast()
tunes and trains an SVR on the transformed panel, extends each raw predictor
with a fitted straight line, pushes those extensions through the recorded
transforms, predicts the transformed target year by year, and integrates the
predictions back to consumption levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadHorizon, SteelcastError, TooShort
from .evaluation import CvSpec, cross_validate, tune_c
from .regression import DesignMatrix, ols_fit
from .series import (
    DifferenceState,
    Panel,
    StandardizationParams,
    TimeSeries,
    difference,
)
from .stattests import adf_test
from .svm import Kernel, SvmProblem, SvrModel, decision, train_svr


@dataclass(frozen=True)
class ColumnTransform:
    """Differencing order and scaling recorded for one panel column."""

    name: str
    order: int
    diff_state: DifferenceState
    std_params: StandardizationParams
    adf_confirmed: bool  # False when the order cap was hit without p < 0.05


@dataclass(frozen=True)
class PipelineState:
    transforms: dict[str, ColumnTransform]
    target_name: str
    observed_start_year: int
    observed_end_year: int
    warnings: tuple[str, ...] = ()
    kernel: Kernel | None = None
    c: float | None = None
    epsilon: float | None = None
    model: SvrModel | None = None

    def with_model(self, kernel: Kernel, c: float, epsilon: float, model: SvrModel) -> "PipelineState":
        return PipelineState(
            transforms=self.transforms,
            target_name=self.target_name,
            observed_start_year=self.observed_start_year,
            observed_end_year=self.observed_end_year,
            warnings=self.warnings,
            kernel=kernel,
            c=c,
            epsilon=epsilon,
            model=model,
        )


@dataclass(frozen=True)
class ForecastReport:
    years: tuple[int, ...]
    levels: tuple[float, ...]
    horizon: int
    unit: str = ""


@dataclass(frozen=True)
class ForecastConfig:
    kernel: Kernel = Kernel("linear")
    epsilon: float = 0.1
    c_grid: tuple[float, ...] = (1.0,)
    folds: int = 10
    repeats: int = 3
    seed: int = 0
    max_diff: int = 1
    preprocess: str = "difference"  # difference | none

    def __post_init__(self):
        if self.preprocess not in ("difference", "none"):
            raise ValueError(f"unknown preprocess mode {self.preprocess!r}")
        if not 0 <= self.max_diff <= 2:
            raise ValueError("max_diff must be 0, 1 or 2")


def extrapolate_linear(s: TimeSeries, horizon: int) -> list[float]:
    """Continue the OLS line through (index, value) for `horizon` steps."""
    if horizon < 0:
        raise BadHorizon(f"horizon must be non-negative, got {horizon}")
    if len(s) < 2:
        raise TooShort("need at least 2 points to fit a trend line")
    if horizon == 0:
        return []
    n = len(s)
    t = np.arange(n, dtype=float)
    fit = ols_fit(DesignMatrix.with_intercept(t), np.asarray(s.values))
    intercept, slope = fit.coefficients
    return [intercept + slope * (n + h) for h in range(horizon)]


def _is_stationary(series: TimeSeries) -> bool:
    values = np.asarray(series.values)
    if np.all(values == values[0]):
        return True  # constant: trivially stationary
    try:
        return adf_test(series).p_value < 0.05
    except SteelcastError:
        # degenerate regression (e.g. an exact trend line); not confirmed
        return False


def choose_diff_order(series: TimeSeries, max_diff: int) -> tuple[int, bool]:
    """Minimal differencing order d <= max_diff at which the series tests
    stationary; (max_diff, False) when the cap is hit without success."""
    for d in range(max_diff + 1):
        candidate, _ = difference(series, d)
        if _is_stationary(candidate):
            return d, True
    return max_diff, False


def _tolerant_standardize(values: tuple[float, ...]) -> tuple[tuple[float, ...], StandardizationParams]:
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1) if n > 1 else 0.0
    std = math.sqrt(var)
    if std <= 1e-12 * max(1.0, abs(mean)):
        std = 1.0  # constant column (up to float dust): center only
    return tuple((v - mean) / std for v in values), StandardizationParams(mean, std)


def prepare(panel: Panel, max_diff: int) -> tuple[Panel, PipelineState]:
    """Difference each column to its minimal stationary order (<= max_diff),
    standardize, and re-align the rows to a common year window."""
    if not 0 <= max_diff <= 2:
        raise ValueError("max_diff must be 0, 1 or 2")
    if panel.n_rows <= max_diff + 1:
        raise TooShort(f"{panel.n_rows} rows cannot support differencing up to {max_diff}")

    chosen: dict[str, tuple[TimeSeries, DifferenceState, bool]] = {}
    warnings = []
    for name in panel.names:
        series = panel.series(name)
        order, confirmed = choose_diff_order(series, max_diff)
        diffed, state = difference(series, order)
        if not confirmed:
            warnings.append(
                f"column {name!r} still non-stationary at the differencing cap {max_diff}"
            )
        chosen[name] = (diffed, state, confirmed)

    max_order = max(state.order for _, state, _ in chosen.values())
    start = panel.start_year + max_order
    columns = {}
    transforms = {}
    for name, (diffed, state, confirmed) in chosen.items():
        trimmed = diffed.window(start, panel.end_year)
        standardized, params = _tolerant_standardize(trimmed.values)
        columns[name] = standardized
        transforms[name] = ColumnTransform(
            name=name,
            order=state.order,
            diff_state=state,
            std_params=params,
            adf_confirmed=confirmed,
        )

    out = Panel(start, columns, panel.target_name)
    state = PipelineState(
        transforms=transforms,
        target_name=panel.target_name,
        observed_start_year=panel.start_year,
        observed_end_year=panel.end_year,
        warnings=tuple(warnings),
    )
    return out, state


def _transform_future(raw: TimeSeries, future_levels: list[float], tr: ColumnTransform) -> list[float]:
    """Push future raw levels of one predictor through its fitted transforms:
    difference the observed+future concatenation, keep the future part, and
    apply the training standardization."""
    extended = TimeSeries(raw.name, raw.start_year, raw.values + tuple(future_levels), raw.unit)
    diffed, _ = difference(extended, tr.order)
    tail = diffed.values[len(diffed.values) - len(future_levels) :]
    p = tr.std_params
    return [(v - p.mean) / p.std for v in tail]


def _level_tails(raw: TimeSeries, order: int) -> list[float]:
    """Last observed value at each differencing level 0..order-1."""
    tails = []
    series = raw
    for _ in range(order):
        tails.append(series.values[-1])
        series, _ = difference(series, 1)
    return tails


def integrate_forward(predicted_diffs: list[float], tails: list[float]) -> list[float]:
    """Extend the level series held in `tails` with new top-level differences."""
    levels = []
    state = list(tails)
    for diff_value in predicted_diffs:
        v = diff_value
        for k in range(len(state) - 1, -1, -1):
            v = state[k] + v
            state[k] = v
        levels.append(v)
    return levels


def forecast(panel: Panel, horizon: int, config: ForecastConfig) -> tuple[ForecastReport, PipelineState]:
    """Multi-year consumption forecast in original level units."""
    if horizon < 1:
        raise BadHorizon(f"horizon must be at least 1, got {horizon}")

    max_diff = config.max_diff if config.preprocess == "difference" else 0
    tpanel, state = prepare(panel, max_diff)

    if len(config.c_grid) > 1:
        spec = CvSpec(folds=min(config.folds, tpanel.n_rows), repeats=config.repeats, seed=config.seed)
        tuned = tune_c(tpanel, config.c_grid, config.kernel, config.epsilon, spec)
        c = tuned.best_c
    elif len(config.c_grid) == 1:
        c = float(config.c_grid[0])
    else:
        raise ValueError("c_grid must contain at least one value")

    x = np.column_stack([tpanel.columns[n] for n in tpanel.predictor_names])
    y = np.asarray(tpanel.columns[tpanel.target_name])
    model = train_svr(SvmProblem(x=x, y=y, c=c, epsilon=config.epsilon), config.kernel)
    state = state.with_model(config.kernel, c, config.epsilon, model)

    # future predictor rows: linear continuation of the raw levels, pushed
    # through the same per-column transforms as the training data
    future_features = []
    for name in tpanel.predictor_names:
        raw = panel.series(name)
        future_levels = extrapolate_linear(raw, horizon)
        future_features.append(_transform_future(raw, future_levels, state.transforms[name]))
    xf = np.column_stack(future_features)

    predicted = decision(model, xf)
    predicted = np.atleast_1d(np.asarray(predicted, dtype=float))

    ttr = state.transforms[panel.target_name]
    diffs = [float(v) * ttr.std_params.std + ttr.std_params.mean for v in predicted]
    tails = _level_tails(panel.target(), ttr.order)
    levels = integrate_forward(diffs, tails)

    first_year = panel.end_year + 1
    report = ForecastReport(
        years=tuple(range(first_year, first_year + horizon)),
        levels=tuple(levels),
        horizon=horizon,
        unit=panel.target().unit,
    )
    return report, state
