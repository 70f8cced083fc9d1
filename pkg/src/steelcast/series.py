"""Annual time series, aligned panels, and the standardize/difference transforms.

Everything here is immutable after construction and all operations are pure,
so values can be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    DuplicateName,
    InvalidState,
    NoCommonPeriod,
    TooShort,
    ZeroVariance,
)


def _check_finite(values, what: str):
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{what} contains a non-finite value: {v!r}")


@dataclass(frozen=True)
class TimeSeries:
    """Annual series: values[i] belongs to year start_year + i."""

    name: str
    start_year: int
    values: tuple[float, ...]
    unit: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValueError("values must be non-empty")
        _check_finite(self.values, f"series {self.name!r}")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def end_year(self) -> int:
        return self.start_year + len(self.values) - 1

    @property
    def years(self) -> range:
        return range(self.start_year, self.end_year + 1)

    def window(self, first_year: int, last_year: int) -> "TimeSeries":
        """Restrict to [first_year, last_year]; both must lie inside the span."""
        if first_year < self.start_year or last_year > self.end_year:
            raise ValueError(f"window outside the span of {self.name!r}")
        lo = first_year - self.start_year
        hi = last_year - self.start_year + 1
        return TimeSeries(self.name, first_year, self.values[lo:hi], self.unit)


@dataclass(frozen=True)
class Panel:
    """Equal-length named columns sharing one start year; one column is the target."""

    start_year: int
    columns: dict[str, tuple[float, ...]]
    target_name: str

    def __post_init__(self):
        if not self.columns:
            raise ValueError("panel needs at least one column")
        columns = {k: tuple(float(v) for v in vs) for k, vs in self.columns.items()}
        object.__setattr__(self, "columns", columns)
        lengths = {len(v) for v in columns.values()}
        if len(lengths) != 1:
            raise ValueError(f"columns have unequal lengths: {sorted(lengths)}")
        if lengths == {0}:
            raise ValueError("columns must be non-empty")
        if self.target_name not in columns:
            raise ValueError(f"target {self.target_name!r} is not a column")
        for name, vs in columns.items():
            _check_finite(vs, f"column {name!r}")

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values())))

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    @property
    def predictor_names(self) -> list[str]:
        return [n for n in self.columns if n != self.target_name]

    @property
    def end_year(self) -> int:
        return self.start_year + self.n_rows - 1

    def series(self, name: str) -> TimeSeries:
        return TimeSeries(name, self.start_year, self.columns[name])

    def target(self) -> TimeSeries:
        return self.series(self.target_name)


@dataclass(frozen=True)
class StandardizationParams:
    mean: float
    std: float

    def __post_init__(self):
        if not self.std > 0:
            raise ValueError("std must be positive")


@dataclass(frozen=True)
class DifferenceState:
    """Inversion record for `difference`: the head value dropped at each level.

    anchors[k] is the first value of the series after k differencing passes,
    which is exactly what `integrate` needs to rebuild level k from level k+1.
    """

    order: int
    anchors: tuple[float, ...] = field(default=())
    start_year_out: int = 0

    def __post_init__(self):
        object.__setattr__(self, "anchors", tuple(float(a) for a in self.anchors))
        if self.order < 0:
            raise ValueError("order must be non-negative")
        if len(self.anchors) != self.order:
            raise ValueError("anchors must have exactly `order` entries")


def align(series_list: list[TimeSeries], target_name: str) -> Panel:
    """Panel over the intersection of the year ranges, column order preserved."""
    if not series_list:
        raise ValueError("series_list must be non-empty")
    names = [s.name for s in series_list]
    if len(set(names)) != len(names):
        dup = sorted({n for n in names if names.count(n) > 1})
        raise DuplicateName(f"duplicate series names: {dup}")
    if target_name not in names:
        raise ValueError(f"target {target_name!r} not among the series")
    first = max(s.start_year for s in series_list)
    last = min(s.end_year for s in series_list)
    if first > last:
        raise NoCommonPeriod(f"no common years (intersection {first}..{last})")
    columns = {s.name: s.window(first, last).values for s in series_list}
    return Panel(first, columns, target_name)


def _sample_mean_std(values) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def standardize(s: TimeSeries) -> tuple[TimeSeries, StandardizationParams]:
    """Shift/scale to mean 0 and sample (n-1) standard deviation 1."""
    if len(s) < 2:
        raise TooShort(f"series {s.name!r} needs at least 2 points to standardize")
    mean, std = _sample_mean_std(s.values)
    if std == 0.0:
        raise ZeroVariance(f"series {s.name!r} is constant")
    out = tuple((v - mean) / std for v in s.values)
    return (
        TimeSeries(s.name, s.start_year, out, s.unit),
        StandardizationParams(mean, std),
    )


def invert_standardize(s: TimeSeries, p: StandardizationParams) -> TimeSeries:
    out = tuple(v * p.std + p.mean for v in s.values)
    return TimeSeries(s.name, s.start_year, out, s.unit)


def difference(s: TimeSeries, d: int) -> tuple[TimeSeries, DifferenceState]:
    """Apply d successive first differences; d = 0 is the identity."""
    if d < 0:
        raise ValueError("d must be non-negative")
    if len(s) <= d:
        raise TooShort(f"series {s.name!r} has {len(s)} points, cannot difference {d} times")
    values = list(s.values)
    anchors = []
    for _ in range(d):
        anchors.append(values[0])
        values = [values[i + 1] - values[i] for i in range(len(values) - 1)]
    state = DifferenceState(order=d, anchors=tuple(anchors), start_year_out=s.start_year + d)
    return TimeSeries(s.name, s.start_year + d, tuple(values), s.unit), state


def integrate(diffs: TimeSeries, state: DifferenceState) -> TimeSeries:
    """Exact inverse of `difference`: rebuild the level series head-first."""
    if diffs.start_year != state.start_year_out:
        raise InvalidState(
            f"series starts {diffs.start_year}, state expects {state.start_year_out}"
        )
    values = list(diffs.values)
    for anchor in reversed(state.anchors):
        rebuilt = [anchor]
        for v in values:
            rebuilt.append(rebuilt[-1] + v)
        values = rebuilt
    return TimeSeries(diffs.name, diffs.start_year - state.order, tuple(values), diffs.unit)
