"""Annual time series container and elementary transforms."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from labprod.errors import AlignmentError, DomainError, InsufficientDataError, ParameterError


@dataclass(frozen=True, eq=False)
class AnnualSeries:
    """Gapless year-indexed sequence of finite real values.

    Parameters
    ----------
    start_year : int
        Calendar year of the first value.
    values : array_like
        One value per consecutive year. Stored as a read-only float array.
    label : str, optional
        Free-form description (variable, units, source).
    """

    start_year: int
    values: np.ndarray
    label: str = field(default="")

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).reshape(-1)
        if arr.size < 1:
            raise InsufficientDataError("series must hold at least one value")
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise DomainError(f"non-finite value in year {int(self.start_year) + bad}")
        arr.setflags(write=False)
        object.__setattr__(self, "start_year", int(self.start_year))
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_mapping(cls, data: dict[int, float], label: str = "") -> AnnualSeries:
        """Build a series from ``{year: value}``; the years must be consecutive."""
        if not data:
            raise InsufficientDataError("empty mapping")
        years = sorted(data)
        for prev, cur in zip(years, years[1:]):
            if cur != prev + 1:
                raise DomainError(f"gap after {prev}")
        return cls(years[0], [data[y] for y in years], label)

    @property
    def end_year(self) -> int:
        return self.start_year + len(self.values) - 1

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.start_year, self.end_year + 1)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, AnnualSeries):
            return NotImplemented
        return (
            self.start_year == other.start_year
            and self.label == other.label
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.start_year, self.label, self.values.tobytes()))

    def __repr__(self):
        return (
            f"AnnualSeries({self.start_year}-{self.end_year}, n={len(self)}, "
            f"label={self.label!r})"
        )

    def __contains__(self, year) -> bool:
        return self.start_year <= year <= self.end_year

    def __getitem__(self, year: int) -> float:
        """Value at a calendar year (not a positional index)."""
        if year not in self:
            raise KeyError(year)
        return float(self.values[year - self.start_year])

    def items(self) -> Iterable[tuple[int, float]]:
        return zip(self.years.tolist(), self.values.tolist())

    def to_dict(self) -> dict[int, float]:
        return dict(self.items())

    def window(self, start: int, end: int) -> AnnualSeries:
        """Restrict to ``start..end`` inclusive, which must lie inside the series."""
        if start > end or start < self.start_year or end > self.end_year:
            raise InsufficientDataError(
                f"{self.label or 'series'} spans {self.start_year}-{self.end_year}, "
                f"cannot cover {start}-{end}"
            )
        i = start - self.start_year
        return AnnualSeries(start, self.values[i : i + end - start + 1], self.label)

    def with_values(self, values, label: str | None = None) -> AnnualSeries:
        return AnnualSeries(self.start_year, values, self.label if label is None else label)

    def relabel(self, label: str) -> AnnualSeries:
        return AnnualSeries(self.start_year, self.values, label)


def growth_rate(s: AnnualSeries) -> AnnualSeries:
    """Annual relative change ``(s(t) - s(t-1)) / s(t-1)``, dated at ``t``."""
    if len(s) < 2:
        raise InsufficientDataError(f"growth rate needs at least 2 years, got {len(s)}")
    nonpos = np.flatnonzero(s.values <= 0)
    if nonpos.size:
        raise DomainError(f"non-positive value in year {s.start_year + int(nonpos[0])}")
    v = s.values
    return AnnualSeries(s.start_year + 1, (v[1:] - v[:-1]) / v[:-1], s.label)


def moving_average_centered(s: AnnualSeries, window: int = 5) -> AnnualSeries:
    """Centered moving average; years without a full window are dropped."""
    if int(window) != window or window < 1 or window % 2 == 0:
        raise ParameterError(f"window must be a positive odd integer, got {window}")
    window = int(window)
    if len(s) < window:
        raise InsufficientDataError(
            f"series of length {len(s)} is shorter than the window {window}"
        )
    if window == 1:
        return s
    h = window // 2
    # direct window sums, no cumulative-sum differencing, to keep round-off local
    v = s.values
    out = np.array([v[i - h : i + h + 1].sum() for i in range(h, len(v) - h)]) / window
    return AnnualSeries(s.start_year + h, out, s.label)


def lag(s: AnnualSeries, k: int) -> AnnualSeries:
    """Shift the series ``k`` years later (negative ``k`` is a lead)."""
    return AnnualSeries(s.start_year + int(k), s.values, s.label)


def common_span(series: Sequence[AnnualSeries]) -> tuple[int, int]:
    """Intersection of the year ranges of ``series``."""
    if not series:
        raise AlignmentError("nothing to align")
    start = max(s.start_year for s in series)
    end = min(s.end_year for s in series)
    if start > end:
        spans = ", ".join(
            f"{s.label or f'#{i}'}: {s.start_year}-{s.end_year}" for i, s in enumerate(series)
        )
        raise AlignmentError(f"no common years ({spans})")
    return start, end


def align(series: Sequence[AnnualSeries]) -> tuple[tuple[int, int], list[AnnualSeries]]:
    """Restrict every series to the common year span.

    Returns
    -------
    span : tuple of int
        ``(first_year, last_year)`` shared by all inputs.
    windows : list of AnnualSeries
        The inputs cut to ``span``, in input order.
    """
    start, end = common_span(series)
    return (start, end), [s.window(start, end) for s in series]
