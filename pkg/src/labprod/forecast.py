"""Cohort-shift extension of the 9-year-old series and productivity forecasts.

Younger cohorts counted today are the 9-year-olds of later years: a
6-year-old in year ``y`` is 9 in ``y + 3`` and a 1-year-old in ``y + 8``.
Shifted counts are used raw, without migration or mortality adjustment.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from labprod.errors import DomainError, InsufficientDataError, NothingToForecastError
from labprod.model import N9ModelParams, productivity_from_n9
from labprod.series import AnnualSeries

MEASURED = "measured-9yo"
SHIFTED_6 = "shifted-6yo"
SHIFTED_1 = "shifted-1yo"

# age -> (provenance tag, years added to reach age 9), in precedence order
COHORT_SHIFTS = {9: (MEASURED, 0), 6: (SHIFTED_6, 3), 1: (SHIFTED_1, 8)}

# the youngest usable cohort is observed at most one year after the last
# measured 9-year-olds, so the cohort extension reaches 9 years ahead
MAX_EXTENSION = 9


class PopulationTable:
    """Population counts keyed by ``(year, age)``."""

    def __init__(self, counts: dict[tuple[int, int], float] | None = None):
        self._counts: dict[tuple[int, int], float] = {}
        for (year, age), count in (counts or {}).items():
            self.add(year, age, count)

    @classmethod
    def from_rows(cls, rows) -> PopulationTable:
        table = cls()
        for year, age, count in rows:
            table.add(year, age, count)
        return table

    @classmethod
    def from_cohorts(cls, cohorts: dict[int, AnnualSeries]) -> PopulationTable:
        """Build from ``{age: AnnualSeries of counts}``."""
        table = cls()
        for age, s in cohorts.items():
            for year, count in s.items():
                table.add(year, age, count)
        return table

    def add(self, year: int, age: int, count: float):
        key = (int(year), int(age))
        if key in self._counts:
            raise DomainError(f"duplicate entry for year {key[0]}, age {key[1]}")
        count = float(count)
        if not math.isfinite(count) or count < 0:
            raise DomainError(f"count for year {key[0]}, age {key[1]} must be finite and >= 0")
        self._counts[key] = count

    def __len__(self):
        return len(self._counts)

    def __eq__(self, other):
        if not isinstance(other, PopulationTable):
            return NotImplemented
        return self._counts == other._counts

    def __contains__(self, key):
        return key in self._counts

    def __getitem__(self, key):
        return self._counts[key]

    def rows(self) -> list[tuple[int, int, float]]:
        return [(y, a, c) for (y, a), c in sorted(self._counts.items())]

    def ages(self) -> list[int]:
        return sorted({a for _, a in self._counts})

    def cohort(self, age: int) -> dict[int, float]:
        """Counts of one age by year."""
        return {y: c for (y, a), c in sorted(self._counts.items()) if a == age}

    def cohort_series(self, age: int) -> AnnualSeries:
        return AnnualSeries.from_mapping(self.cohort(age), label=f"age {age}")


def _shifted_cohorts(pop: PopulationTable) -> dict[str, dict[int, float]]:
    out = {}
    for age, (tag, shift) in COHORT_SHIFTS.items():
        counts = pop.cohort(age)
        if counts:
            out[tag] = {y + shift: c for y, c in counts.items()}
    return out


def extend_n9(pop: PopulationTable) -> tuple[AnnualSeries, dict[int, str]]:
    """9-year-old counts extended forward with shifted younger cohorts.

    Each year takes the measured count if present, else the 6-year-olds
    three years earlier, else the 1-year-olds eight years earlier. The
    result is the gapless run of covered years around the last measured
    year; years outside that run are omitted.

    Returns
    -------
    n9 : AnnualSeries
    provenance : dict
        Year -> source tag (``measured-9yo``, ``shifted-6yo``, ``shifted-1yo``).
    """
    covered: dict[int, tuple[float, str]] = {}
    for tag, counts in _shifted_cohorts(pop).items():
        for year, c in counts.items():
            covered.setdefault(year, (c, tag))
    if not covered:
        raise InsufficientDataError("population table has no age 9, 6 or 1 counts")

    measured = pop.cohort(9)
    anchor = max(measured) if measured else max(covered)
    if anchor not in covered:
        anchor = max(covered)
    lo = hi = anchor
    while lo - 1 in covered:
        lo -= 1
    while hi + 1 in covered:
        hi += 1
    years = range(lo, hi + 1)
    n9 = AnnualSeries(lo, [covered[y][0] for y in years], label="N9 (extended)")
    return n9, {y: covered[y][1] for y in years}


@dataclass(frozen=True)
class ForecastPoint:
    year: int
    dpp: float
    provenance: str


@dataclass(frozen=True)
class ForecastSeries:
    points: tuple[ForecastPoint, ...]
    last_measured_year: int
    params: N9ModelParams

    def __post_init__(self):
        years = [p.year for p in self.points]
        if any(b <= a for a, b in zip(years, years[1:])):
            raise ValueError("forecast years must be strictly increasing")

    @property
    def years(self) -> list[int]:
        return [p.year for p in self.points]

    @property
    def horizon(self) -> int:
        """Years between the last measured 9-year-old count and the last forecast point."""
        return self.points[-1].year - self.last_measured_year

    def to_series(self) -> AnnualSeries:
        return AnnualSeries(self.points[0].year, [p.dpp for p in self.points], label="dP/P forecast")

    def summary_lines(self) -> list[str]:
        counts = {}
        for p in self.points:
            counts[p.provenance] = counts.get(p.provenance, 0) + 1
        lines = [
            f"last_measured_9yo\t{self.last_measured_year}",
            f"first_year\t{self.points[0].year}",
            f"last_year\t{self.points[-1].year}",
            f"horizon_years\t{self.horizon}",
        ]
        lines += [f"points_{tag}\t{n}" for tag, n in sorted(counts.items())]
        return lines


def forecast_productivity(
    pop: PopulationTable, p: N9ModelParams, last_observed_year: int | None = None
) -> ForecastSeries:
    """Productivity growth forecast for the years after ``last_observed_year``.

    Forecast points run at most ``9 + T`` years past the last measured
    9-year-old count. ``last_observed_year`` defaults to that count's year.
    """
    measured = pop.cohort(9)
    if not measured:
        raise NothingToForecastError("no measured 9-year-old counts to anchor the forecast")
    last9 = max(measured)
    if last_observed_year is None:
        last_observed_year = last9
    n9, provenance = extend_n9(pop)
    dpp = productivity_from_n9(n9, p)
    limit = last9 + MAX_EXTENSION + p.T
    points = tuple(
        ForecastPoint(y, v, provenance[y - p.T])
        for y, v in dpp.items()
        if last_observed_year < y <= limit
    )
    if not points:
        raise NothingToForecastError(
            f"cohort data gives no N9 beyond {last_observed_year - p.T}; "
            "add younger cohorts (ages 6 or 1) or an earlier last observed year"
        )
    return ForecastSeries(points, last9, p)


@dataclass(frozen=True)
class DiscrepancyRow:
    year: int
    first: str
    second: str
    rate_first: float
    rate_second: float

    @property
    def difference(self) -> float:
        return self.rate_first - self.rate_second


@dataclass(frozen=True)
class ConsistencyReport:
    rows: tuple[DiscrepancyRow, ...]
    tolerance: float
    pairs: tuple[tuple[str, str], ...] = field(default=())

    @property
    def empty(self) -> bool:
        return not self.rows

    @property
    def max_abs(self) -> float:
        return max((abs(r.difference) for r in self.rows), default=float("nan"))

    @property
    def mean_abs(self) -> float:
        if not self.rows:
            return float("nan")
        return float(np.mean([abs(r.difference) for r in self.rows]))

    @property
    def flagged(self) -> list[DiscrepancyRow]:
        return [r for r in self.rows if abs(r.difference) > self.tolerance]


def _rates(counts: dict[int, float]) -> dict[int, float]:
    return {
        y: (c - counts[y - 1]) / counts[y - 1]
        for y, c in counts.items()
        if y - 1 in counts and counts[y - 1] > 0
    }


def cohort_consistency(pop: PopulationTable, tolerance: float = 1e-3) -> ConsistencyReport:
    """Compare growth rates of the shifted cohorts year by year.

    For every pair of available cohorts and every year both cover, reports
    the difference of their annual growth rates. Years where it exceeds
    ``tolerance`` in magnitude are listed by ``flagged``. No overlap gives an
    empty report.
    """
    rates = {tag: _rates(c) for tag, c in _shifted_cohorts(pop).items()}
    rows = []
    pairs = tuple(itertools.combinations(rates, 2))
    for a, b in pairs:
        for year in sorted(set(rates[a]) & set(rates[b])):
            rows.append(DiscrepancyRow(year, a, b, rates[a][year], rates[b][year]))
    return ConsistencyReport(tuple(rows), tolerance, pairs)
