"""Correlation tests (Pearson, Kendall, Spearman) and stationarity tests (ADF, KPSS).

ADF fits the trend-augmented regression

    dy[t] = a + b*t + g*y[t-1] + sum_i d_i * dy[t-i] + e[t]

and reports the t-ratio of g. Its p-value comes from linear interpolation in
the classic Dickey-Fuller small-sample table for the constant+trend case
(Fuller 1976 as tabulated by Banerjee et al. 1993), first across sample
sizes, then across statistic values, clamped to [0.01, 0.99].

KPSS is the level-stationarity variant: demean, cumulate, and normalize by
the Bartlett-weighted long-run variance. Its p-value interpolates the four
tabulated critical values and is clamped to [0.01, 0.10].

Both clamps set the `p_clamped` flag so callers can tell a boundary value
from an interior one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from .errors import TooShort, ZeroVariance
from .regression import DesignMatrix, ols_fit
from .series import TimeSeries

__all__ = [
    "CorrelationResult",
    "StationarityResult",
    "pearson_test",
    "kendall_test",
    "spearman_test",
    "adf_test",
    "kpss_test",
    "adf_default_lag",
    "kpss_default_lag",
    "normal_cdf",
    "student_t_cdf",
]


@dataclass(frozen=True)
class CorrelationResult:
    method: str  # pearson | kendall | spearman
    coefficient: float
    statistic: float  # t for pearson, z for kendall, S for spearman
    p_value: float
    n: int


@dataclass(frozen=True)
class StationarityResult:
    test: str  # adf | kpss
    lag: int
    statistic: float
    p_value: float
    p_clamped: bool
    stationary_at_5pct: bool


# ---------------------------------------------------------------------------
# distribution helpers

def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def _normal_sf(z: float) -> float:
    # erfc keeps precision in the far tail where 1 - cdf would cancel
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def student_t_cdf(t: float, df: int) -> float:
    if df < 1:
        raise ValueError("df must be at least 1")
    return 1.0 - _student_t_sf(t, df) if t >= 0 else _student_t_sf(-t, df)


def _student_t_sf(t: float, df: int) -> float:
    """P(T > t) for t >= 0, via the regularized incomplete beta function."""
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return 0.5 * float(betainc(df / 2.0, 0.5, x))


def _two_sided_t_p(t: float, df: int) -> float:
    return min(1.0, 2.0 * _student_t_sf(abs(t), df))


def _two_sided_normal_p(z: float) -> float:
    return min(1.0, 2.0 * _normal_sf(abs(z)))


# ---------------------------------------------------------------------------
# correlation suite

def _as_arrays(x, y, n_min: int) -> tuple[np.ndarray, np.ndarray]:
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValueError(f"inputs must be equal-length 1-D, got {xa.shape} and {ya.shape}")
    if len(xa) < n_min:
        raise TooShort(f"need at least {n_min} observations, got {len(xa)}")
    return xa, ya


def pearson_test(x, y) -> CorrelationResult:
    """Sample Pearson correlation with the exact t test (n-2 df)."""
    xa, ya = _as_arrays(x, y, 3)
    n = len(xa)
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sx = float(dx @ dx)
    sy = float(dy @ dy)
    if sx == 0 or sy == 0:
        raise ZeroVariance("pearson correlation is undefined for a constant input")
    r = float(dx @ dy) / math.sqrt(sx * sy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        t = math.inf if r > 0 else -math.inf
        p = 0.0
    else:
        t = r * math.sqrt((n - 2) / (1.0 - r * r))
        p = _two_sided_t_p(t, n - 2)
    return CorrelationResult("pearson", r, t, p, n)


def _tie_group_sizes(values: np.ndarray) -> list[int]:
    _, counts = np.unique(values, return_counts=True)
    return [int(c) for c in counts if c > 1]


def kendall_test(x, y) -> CorrelationResult:
    """Kendall's tau-b with tie correction; z from the tie-adjusted normal
    approximation (the same variance used by R's cor.test and scipy)."""
    xa, ya = _as_arrays(x, y, 3)
    n = len(xa)

    concordant_minus_discordant = 0
    for i in range(n - 1):
        dx = np.sign(xa[i + 1 :] - xa[i])
        dy = np.sign(ya[i + 1 :] - ya[i])
        concordant_minus_discordant += int(np.sum(dx * dy))

    n0 = n * (n - 1) // 2
    xt = _tie_group_sizes(xa)
    yt = _tie_group_sizes(ya)
    n1 = sum(t * (t - 1) // 2 for t in xt)
    n2 = sum(u * (u - 1) // 2 for u in yt)
    denom = math.sqrt(float(n0 - n1)) * math.sqrt(float(n0 - n2))
    if denom == 0:
        raise ZeroVariance("kendall tau is undefined when one input is constant")
    tau = concordant_minus_discordant / denom

    v0 = n * (n - 1) * (2 * n + 5)
    vt = sum(t * (t - 1) * (2 * t + 5) for t in xt)
    vu = sum(u * (u - 1) * (2 * u + 5) for u in yt)
    v1 = (
        sum(t * (t - 1) for t in xt)
        * sum(u * (u - 1) for u in yt)
        / (2.0 * n * (n - 1))
    )
    v2 = (
        sum(t * (t - 1) * (t - 2) for t in xt)
        * sum(u * (u - 1) * (u - 2) for u in yt)
        / (9.0 * n * (n - 1) * (n - 2))
    )
    var = (v0 - vt - vu) / 18.0 + v1 + v2
    if var <= 0:
        raise ZeroVariance("degenerate tie structure")
    z = concordant_minus_discordant / math.sqrt(var)
    p = _two_sided_normal_p(z)
    return CorrelationResult("kendall", max(-1.0, min(1.0, tau)), z, p, n)


def average_ranks(values) -> np.ndarray:
    """Ranks 1..n with ties replaced by the mean of their rank positions."""
    va = np.asarray(values, dtype=float)
    order = np.argsort(va, kind="stable")
    ranks = np.empty(len(va), dtype=float)
    i = 0
    while i < len(va):
        j = i
        while j + 1 < len(va) and va[order[j + 1]] == va[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman_test(x, y) -> CorrelationResult:
    """Spearman's rho on average ranks; the reported statistic is the rank
    distance sum S = sum(d_i^2), fractional under ties."""
    xa, ya = _as_arrays(x, y, 3)
    n = len(xa)
    rx = average_ranks(xa)
    ry = average_ranks(ya)
    d = rx - ry
    s = float(d @ d)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sx = float(dx @ dx)
    sy = float(dy @ dy)
    if sx == 0 or sy == 0:
        raise ZeroVariance("spearman rho is undefined for a constant input")
    rho = float(dx @ dy) / math.sqrt(sx * sy)
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) == 1.0:
        p = 0.0
    else:
        t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
        p = _two_sided_t_p(t, n - 2)
    return CorrelationResult("spearman", rho, s, p, n)


# ---------------------------------------------------------------------------
# stationarity tests

# Dickey-Fuller percentiles of the t-statistic, constant + trend case.
# Rows: sample sizes 25, 50, 100, 250, 500, inf. Columns: the probabilities
# in _ADF_PROBS. (Fuller 1976, via Banerjee, Dolado, Galbraith & Hendry 1993.)
_ADF_SIZES = np.array([25.0, 50.0, 100.0, 250.0, 500.0, 1e5])
_ADF_PROBS = np.array([0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99])
_ADF_TABLE = -np.array(
    [
        [4.38, 3.95, 3.60, 3.24, 1.14, 0.80, 0.50, 0.15],
        [4.15, 3.80, 3.50, 3.18, 1.19, 0.87, 0.58, 0.24],
        [4.04, 3.73, 3.45, 3.15, 1.22, 0.90, 0.62, 0.28],
        [3.99, 3.69, 3.43, 3.13, 1.23, 0.92, 0.64, 0.31],
        [3.98, 3.68, 3.42, 3.13, 1.24, 0.93, 0.65, 0.32],
        [3.96, 3.66, 3.41, 3.12, 1.25, 0.94, 0.66, 0.33],
    ]
)

# KPSS level-stationarity critical values (Kwiatkowski et al. 1992, Table 1).
_KPSS_STATS = np.array([0.347, 0.463, 0.574, 0.739])
_KPSS_PROBS = np.array([0.10, 0.05, 0.025, 0.01])


def adf_default_lag(n: int) -> int:
    return int(math.floor((n - 1) ** (1.0 / 3.0)))


def kpss_default_lag(n: int) -> int:
    return int(math.floor(4.0 * (n / 100.0) ** 0.25))


def _interp_clamped(x: float, xs: np.ndarray, ys: np.ndarray) -> tuple[float, bool]:
    """Piecewise-linear interpolation of y(x); the flag reports that x sat at
    or beyond a table boundary, i.e. y was pinned to the tabulated extreme."""
    if x <= xs[0]:
        return float(ys[0]), True
    if x >= xs[-1]:
        return float(ys[-1]), True
    return float(np.interp(x, xs, ys)), False


def adf_test(s: TimeSeries, lag: int | None = None) -> StationarityResult:
    """Augmented Dickey-Fuller test with drift and deterministic trend.

    `lag` is the number of lagged difference terms; default floor((n-1)^(1/3)).
    Null hypothesis: unit root. Low p-values indicate stationarity.
    """
    y = np.asarray(s.values, dtype=float)
    n = len(y)
    if lag is None:
        lag = adf_default_lag(n)
    if lag < 0:
        raise ValueError("lag must be non-negative")
    if n < lag + 10:
        raise TooShort(f"ADF with lag {lag} needs at least {lag + 10} points, got {n}")

    dy = np.diff(y)
    rows = len(dy) - lag  # responses dy[lag], ..., dy[n-2]
    if rows <= lag + 3:
        raise TooShort(f"only {rows} usable rows for {lag + 3} regressors")
    response = dy[lag:]
    level = y[lag : n - 1]
    trend = np.arange(rows, dtype=float)
    lagged = [dy[lag - i : len(dy) - i] for i in range(1, lag + 1)]
    design = DesignMatrix(
        np.column_stack([np.ones(rows), trend, level] + lagged),
        intercept_included=True,
    )
    fit = ols_fit(design, response)
    stat = fit.t_statistic(2)

    # interpolate the table row for this sample size, then the p-value;
    # the effective size convention (n - 1 first differences) matches the
    # published small-sample tabulation
    size = float(n - 1)
    col = np.array(
        [_interp_clamped(size, _ADF_SIZES, _ADF_TABLE[:, j])[0] for j in range(len(_ADF_PROBS))]
    )
    p, clamped = _interp_clamped(stat, col, _ADF_PROBS)
    return StationarityResult(
        test="adf",
        lag=lag,
        statistic=float(stat),
        p_value=p,
        p_clamped=clamped,
        stationary_at_5pct=p < 0.05,
    )


def kpss_test(s: TimeSeries, lag: int | None = None) -> StationarityResult:
    """KPSS level-stationarity test with Bartlett-weighted long-run variance.

    Null hypothesis: stationarity. High p-values indicate stationarity.
    """
    y = np.asarray(s.values, dtype=float)
    n = len(y)
    if n < 10:
        raise TooShort(f"KPSS needs at least 10 points, got {n}")
    if lag is None:
        lag = kpss_default_lag(n)
    if lag < 0 or lag >= n:
        raise ValueError(f"lag must be in [0, {n - 1}]")

    e = y - y.mean()
    partial = np.cumsum(e)
    eta = float(partial @ partial) / (n * n)
    long_run = float(e @ e)
    for i in range(1, lag + 1):
        w = 1.0 - i / (lag + 1.0)
        long_run += 2.0 * w * float(e[i:] @ e[:-i])
    long_run /= n
    if long_run <= 0:
        raise ZeroVariance("long-run variance is zero (constant series?)")
    stat = eta / long_run

    p, clamped = _interp_clamped(stat, _KPSS_STATS, _KPSS_PROBS)
    return StationarityResult(
        test="kpss",
        lag=lag,
        statistic=float(stat),
        p_value=p,
        p_clamped=clamped,
        stationary_at_5pct=p > 0.05,
    )
