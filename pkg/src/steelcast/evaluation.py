"""Train/test splitting, regression metrics, repeated k-fold CV, and grid
tuning of the SVR cost parameter.

Everything randomized is a pure function of (inputs, seed): shuffles come
from the SplitMix64 stream documented in `rng`, folds are dealt in a fixed
order, and reductions run in a fixed order, so repeated runs are
bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadC, BadFraction, EmptyGrid, ShapeError, TooFewRows
from .rng import SplitMix64
from .series import Panel
from .svm import Kernel, SvmProblem, decision, train_svr

# spans the region around cost 1.0-1.5 where annual macro panels land
DEFAULT_C_GRID = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 3.0, 4.0)


@dataclass(frozen=True)
class Metrics:
    rmse: float
    mae: float
    r_squared: float | None  # None when the observed values are constant


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float
    seed: int

    def __post_init__(self):
        if not (0.0 < self.train_fraction < 1.0):
            raise BadFraction(f"train_fraction must lie in (0, 1), got {self.train_fraction}")


@dataclass(frozen=True)
class CvSpec:
    folds: int
    repeats: int
    seed: int

    def __post_init__(self):
        if self.folds < 2:
            raise ValueError("folds must be at least 2")
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")


@dataclass(frozen=True)
class TuneResult:
    grid: tuple[tuple[float, float, float], ...]  # (c, mean_rmse, sd_rmse)
    best_c: float


def _subset_panel(panel: Panel, indices: list[int]) -> Panel:
    columns = {
        name: tuple(values[i] for i in indices) for name, values in panel.columns.items()
    }
    return Panel(panel.start_year, columns, panel.target_name)


def split_indices(n_rows: int, spec: SplitSpec) -> tuple[list[int], list[int]]:
    """Seeded shuffled row split; first ceil(fraction * n) rows train."""
    order = SplitMix64(spec.seed).permutation(n_rows)
    n_train = math.ceil(spec.train_fraction * n_rows)
    return order[:n_train], order[n_train:]


def split(panel: Panel, spec: SplitSpec) -> tuple[Panel, Panel]:
    """Disjoint, exhaustive train/test partition of the panel rows."""
    if panel.n_rows < 3:
        raise TooFewRows(f"need at least 3 rows to split, got {panel.n_rows}")
    train_idx, test_idx = split_indices(panel.n_rows, spec)
    return _subset_panel(panel, train_idx), _subset_panel(panel, test_idx)


def compute_metrics(y, yhat) -> Metrics:
    ya = np.asarray(y, dtype=float)
    pa = np.asarray(yhat, dtype=float)
    if ya.shape != pa.shape or ya.ndim != 1 or len(ya) == 0:
        raise ShapeError(f"need equal-length non-empty vectors, got {ya.shape} and {pa.shape}")
    err = pa - ya
    rmse = float(math.sqrt(np.mean(err * err)))
    mae = float(np.mean(np.abs(err)))
    ss_tot = float(np.sum((ya - ya.mean()) ** 2))
    if ss_tot == 0:
        r2 = None
    else:
        r2 = 1.0 - float(err @ err) / ss_tot
    return Metrics(rmse=rmse, mae=mae, r_squared=r2)


def _panel_xy(panel: Panel) -> tuple[np.ndarray, np.ndarray]:
    x = np.column_stack([panel.columns[n] for n in panel.predictor_names])
    y = np.asarray(panel.columns[panel.target_name], dtype=float)
    return x, y


def fold_assignments(n_rows: int, spec: CvSpec) -> list[list[list[int]]]:
    """Per repeat, the validation index lists of each fold.

    Rows are shuffled by one continuing seeded stream and dealt into
    contiguous blocks whose sizes differ by at most one; remainder rows go to
    the earliest folds.
    """
    if spec.folds > n_rows:
        raise TooFewRows(f"{spec.folds} folds need at least {spec.folds} rows, got {n_rows}")
    rng = SplitMix64(spec.seed)
    base, extra = divmod(n_rows, spec.folds)
    out = []
    for _ in range(spec.repeats):
        order = rng.permutation(n_rows)
        folds = []
        at = 0
        for f in range(spec.folds):
            size = base + (1 if f < extra else 0)
            folds.append(order[at : at + size])
            at += size
        out.append(folds)
    return out


def cross_validate(
    panel: Panel,
    c: float,
    kernel: Kernel,
    epsilon: float,
    spec: CvSpec,
) -> tuple[float, float]:
    """Mean and sample standard deviation of per-fold validation RMSE over
    folds x repeats, training an SVR on the remaining rows each time."""
    if not c > 0:
        raise BadC(f"c must be positive, got {c}")
    x, y = _panel_xy(panel)
    scores = []
    for folds in fold_assignments(panel.n_rows, spec):
        for valid in folds:
            valid_set = set(valid)
            train = [i for i in range(panel.n_rows) if i not in valid_set]
            prob = SvmProblem(x=x[train], y=y[train], c=c, epsilon=epsilon)
            model = train_svr(prob, kernel)
            pred = decision(model, x[valid])
            err = np.asarray(pred) - y[valid]
            scores.append(float(math.sqrt(np.mean(err * err))))
    mean = sum(scores) / len(scores)
    if len(scores) > 1:
        sd = math.sqrt(sum((s - mean) ** 2 for s in scores) / (len(scores) - 1))
    else:
        sd = 0.0
    return mean, sd


def tune_c(
    panel: Panel,
    grid,
    kernel: Kernel,
    epsilon: float,
    spec: CvSpec,
) -> TuneResult:
    """Cross-validate each candidate cost with identical fold assignments and
    pick the smallest c attaining the minimum mean RMSE."""
    grid = [float(c) for c in grid]
    if not grid:
        raise EmptyGrid("grid of c values is empty")
    for c in grid:
        if not c > 0:
            raise BadC(f"grid contains non-positive c: {c}")
    curve = []
    for c in grid:
        mean, sd = cross_validate(panel, c, kernel, epsilon, spec)
        curve.append((c, mean, sd))
    best = min(curve, key=lambda row: (row[1], row[0]))
    return TuneResult(grid=tuple(curve), best_c=best[0])
