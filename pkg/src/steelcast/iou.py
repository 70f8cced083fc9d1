"""Intensity-of-use model: consumption per unit of output, and the log-log
power-law fit consumption = scale * output**elasticity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveInput, NonPositiveOutput, TooShort
from .regression import DesignMatrix, LinearModel, ols_fit
from .series import TimeSeries, align


@dataclass(frozen=True)
class IouFit:
    """Log-space OLS of consumption on output.

    `elasticity` is the exponent of the power law and `log_scale` the log of
    its multiplicative constant; `diagnostics` is the underlying linear model
    (coefficients [log_scale, elasticity]), and `iu_series` the pointwise
    consumption/output ratio over the fitted years.
    """

    elasticity: float
    log_scale: float
    diagnostics: LinearModel
    iu_series: TimeSeries


def _common_window(c: TimeSeries, y: TimeSeries) -> tuple[TimeSeries, TimeSeries]:
    panel = align([c, y], target_name=c.name)
    return panel.series(c.name), panel.series(y.name)


def intensity_of_use(c: TimeSeries, y: TimeSeries) -> TimeSeries:
    """Pointwise consumption/output ratio over the common years."""
    if c.name == y.name:
        raise ValueError("consumption and output series need distinct names")
    cw, yw = _common_window(c, y)
    if any(v <= 0 for v in yw.values):
        raise NonPositiveOutput(f"output series {y.name!r} has non-positive values")
    ratios = tuple(cv / yv for cv, yv in zip(cw.values, yw.values))
    unit = f"{c.unit}/{y.unit}" if c.unit or y.unit else ""
    return TimeSeries(f"{c.name}_per_{y.name}", cw.start_year, ratios, unit)


def fit_iou(c: TimeSeries, y: TimeSeries) -> IouFit:
    """OLS of log consumption on [1, log output] over the common years."""
    if c.name == y.name:
        raise ValueError("consumption and output series need distinct names")
    cw, yw = _common_window(c, y)
    if any(v <= 0 for v in cw.values) or any(v <= 0 for v in yw.values):
        raise NonPositiveInput("log-log fit requires strictly positive series")
    if len(cw) < 3:
        raise TooShort(f"common period has {len(cw)} years, need at least 3")
    log_c = np.log(np.asarray(cw.values))
    log_y = np.log(np.asarray(yw.values))
    fit = ols_fit(DesignMatrix.with_intercept(log_y), log_c)
    iu = intensity_of_use(cw, yw)
    return IouFit(
        elasticity=fit.coefficients[1],
        log_scale=fit.coefficients[0],
        diagnostics=fit,
        iu_series=iu,
    )


def power_law_value(fit: IouFit, output: float) -> float:
    """Evaluate the fitted power law at a given output level."""
    return math.exp(fit.log_scale) * output**fit.elasticity
