"""Productivity model equations.

Four routes to the productivity growth rate ``dP/P``:

* from labor force participation (LFP) through an exponential sensitivity,
* from the 9-year-old cohort, ``N9(t-T)/B + C``,
* from real GDP per capita ``G`` through a synthetic specific-age population,
* and the forward LFP simulation driven by ``G``.

All routes share the excess-growth driver ``dG/G - A/G``. Both terms of the
driver are taken against the start-of-year level ``G(t-1)``, so the driver
vanishes exactly when ``G`` grows by the constant increment ``A``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from labprod.errors import DegeneracyError, DomainError, InsufficientDataError, ParameterError
from labprod.series import AnnualSeries, growth_rate, lag

log = logging.getLogger(__name__)

STEADY_STATE_BOUNDS = (-0.05, 0.15)
MAX_LAG = 5


def _check_lag(T):
    if int(T) != T or not 0 <= T <= MAX_LAG:
        raise ParameterError(f"lag T must be a whole number of years in 0..{MAX_LAG}, got {T}")


def _check_lfp0(LFP0):
    if not 0 < LFP0 <= 1:
        raise ParameterError(f"LFP0 must lie in (0, 1], got {LFP0}")


@dataclass(frozen=True, kw_only=True)
class GdpModelParams:
    """Constants of the GDP-driven model (synthetic population + productivity).

    ``A2`` is in dollars per year, ``B`` and ``N0`` in persons, ``C`` in 1/year.
    """

    A2: float
    B: float
    C: float
    N0: float
    T: int = 2
    t0: int = 1959

    def __post_init__(self):
        if self.B == 0:
            raise ParameterError("B must be nonzero")
        if not self.N0 > 0:
            raise ParameterError(f"N0 must be positive, got {self.N0}")
        if not self.A2 > 0:
            raise ParameterError(f"A2 must be positive, got {self.A2}")
        _check_lag(self.T)
        object.__setattr__(self, "T", int(self.T))
        object.__setattr__(self, "t0", int(self.t0))

    @property
    def steady_state(self) -> float:
        """Growth rate produced while the synthetic population stays at ``N0``."""
        return self.N0 / self.B + self.C


@dataclass(frozen=True, kw_only=True)
class N9ModelParams:
    B: float
    C: float
    T: int = 2

    def __post_init__(self):
        if self.B == 0:
            raise ParameterError("B must be nonzero")
        _check_lag(self.T)
        object.__setattr__(self, "T", int(self.T))


@dataclass(frozen=True, kw_only=True)
class LfpResponseParams:
    B2: float
    C2: float
    alpha: float
    LFP0: float
    t0: int | None = None

    def __post_init__(self):
        _check_lfp0(self.LFP0)
        if not math.isfinite(self.alpha):
            raise ParameterError("alpha must be finite")


@dataclass(frozen=True, kw_only=True)
class LfpSimParams:
    A1: float
    B1: float
    C1: float
    alpha: float
    LFP0: float
    t0: int
    T: int = 2

    def __post_init__(self):
        if self.B1 == 0:
            raise ParameterError("B1 must be nonzero")
        if not self.A1 > 0:
            raise ParameterError(f"A1 must be positive, got {self.A1}")
        _check_lfp0(self.LFP0)
        _check_lag(self.T)
        object.__setattr__(self, "T", int(self.T))
        object.__setattr__(self, "t0", int(self.t0))


@dataclass(frozen=True, kw_only=True)
class LfpToCohortParams:
    B3: float
    C3: float
    alpha2: float
    LFP0: float
    T: int = 2
    t0: int | None = None

    def __post_init__(self):
        if self.B3 == 0:
            raise ParameterError("B3 must be nonzero")
        _check_lfp0(self.LFP0)
        _check_lag(self.T)
        object.__setattr__(self, "T", int(self.T))


# Published country parameter sets (N0 is the 1959 synthetic population).
# The "us" set is kept as printed; its steady state is far outside plausible
# rates and check_params flags it.
COUNTRY_PRESETS = {
    "us": GdpModelParams(N0=4_500_000, A2=420, B=3_500_000, C=-0.095),
    "france": GdpModelParams(N0=570_000, A2=450, B=7_500_000, C=-0.022),
    "italy": GdpModelParams(N0=570_000, A2=550, B=5_000_000, C=-0.018),
    "canada": GdpModelParams(N0=270_000, A2=300, B=-3_200_000, C=0.108),
    "uk": GdpModelParams(N0=670_000, A2=390, B=7_500_000, C=-0.02),
    "japan": GdpModelParams(N0=2_000_000, A2=400, B=4_000_000, C=-0.018),
}

# US potential-growth constants for GDP per capita (A1) and productivity (A2)
US_A1 = 420.0
US_A2 = 398.0


def _require_positive(s: AnnualSeries, what: str):
    bad = np.flatnonzero(s.values <= 0)
    if bad.size:
        raise DomainError(f"{what} must be positive; year {s.start_year + int(bad[0])}")


def _require_lfp_range(s: AnnualSeries):
    bad = np.flatnonzero((s.values <= 0) | (s.values > 1))
    if bad.size:
        y = s.start_year + int(bad[0])
        raise DomainError(f"LFP must lie in (0, 1]; year {y} has {s[y]!r}")


def potential_rate(G: AnnualSeries, A: float) -> AnnualSeries:
    """Potential growth rate ``A / G(t)``."""
    _require_positive(G, "GDP per capita")
    return G.with_values(A / G.values, label=f"{A:g}/G")


def excess_growth(G: AnnualSeries, A: float) -> AnnualSeries:
    """Growth of ``G`` above its potential, ``(G(t) - G(t-1) - A) / G(t-1)``, dated at ``t``."""
    _require_positive(G, "GDP per capita")
    rate = growth_rate(G)
    base = G.values[:-1]
    return rate.with_values(rate.values - A / base, label="excess growth")


def _driver_span_check(G: AnnualSeries, t0: int, T: int):
    if G.start_year > t0 - T:
        raise InsufficientDataError(
            f"G starts in {G.start_year}; lag {T} from {t0} needs G from {t0 - T}"
        )
    if G.end_year + T <= t0:
        raise InsufficientDataError(f"G ends in {G.end_year}; nothing to drive past {t0}")


def synthetic_population(
    G: AnnualSeries, A2: float, N0: float, t0: int, T: int
) -> AnnualSeries:
    """Synthetic specific-age population driven by excess growth of ``G``.

    ``N(t0) = N0`` and ``N(t) = N(t-1) * (2 * g(t-T) + 1)`` with ``g`` the
    excess growth at potential constant ``A2``. The path runs to ``G.end_year + T``.

    Raises
    ------
    DegeneracyError
        If a growth factor is not positive (the population would vanish).
    """
    if not N0 > 0:
        raise ParameterError(f"N0 must be positive, got {N0}")
    _check_lag(T)
    T = int(T)
    _driver_span_check(G, t0, T)
    g = excess_growth(G, A2)
    drive = lag(g, T).window(t0 + 1, G.end_year + T)
    factors = 2.0 * drive.values + 1.0
    bad = np.flatnonzero(factors <= 0)
    if bad.size:
        year = t0 + 1 + int(bad[0])
        raise DegeneracyError(
            f"population factor {factors[bad[0]]:.4g} <= 0 in {year}", year=year
        )
    path = N0 * np.concatenate(([1.0], np.cumprod(factors)))
    return AnnualSeries(t0, path, label="synthetic population")


def productivity_from_g(G: AnnualSeries, p: GdpModelParams) -> AnnualSeries:
    """``dP/P(t) = N(t-T)/B + C`` on the synthetic population path."""
    N = synthetic_population(G, p.A2, p.N0, p.t0, p.T)
    return AnnualSeries(N.start_year + p.T, N.values / p.B + p.C, label="dP/P from G")


def productivity_from_n9(N9: AnnualSeries, p: N9ModelParams) -> AnnualSeries:
    """``dP/P(t) = N9(t-T)/B + C``."""
    _require_positive(N9, "N9")
    return AnnualSeries(N9.start_year + p.T, N9.values / p.B + p.C, label="dP/P from N9")


def lfp_response_terms(
    LFP: AnnualSeries, alpha: float, LFP0: float
) -> tuple[AnnualSeries, AnnualSeries]:
    """Regressors of the LFP response: ``r*e`` and ``e``.

    ``r`` is ``dLFP/LFP`` and ``e = exp(alpha * (LFP(t) - LFP0) / LFP0)``,
    so that ``dP/P = B2 * (r*e) + C2 * e``.
    """
    _require_lfp_range(LFP)
    r = growth_rate(LFP)
    level = LFP.values[1:]
    e = np.exp(alpha * (level - LFP0) / LFP0)
    return r.with_values(r.values * e, label="r*e"), r.with_values(e, label="e")


def productivity_from_lfp(LFP: AnnualSeries, p: LfpResponseParams) -> AnnualSeries:
    """``dP/P = (B2 * dLFP/LFP + C2) * exp(alpha * (LFP - LFP0) / LFP0)``."""
    re, e = lfp_response_terms(LFP, p.alpha, p.LFP0)
    return re.with_values(p.B2 * re.values + p.C2 * e.values, label="dP/P from LFP")


def n9_implied_by_lfp(LFP: AnnualSeries, p: LfpToCohortParams) -> AnnualSeries:
    """Cohort size implied by the LFP path, dated ``T`` years before the LFP year."""
    re, e = lfp_response_terms(LFP, p.alpha2, p.LFP0)
    out = re.with_values(p.B3 * re.values + p.C3 * e.values, label="implied N9")
    return lag(out, -p.T)


def simulate_lfp(G: AnnualSeries, p: LfpSimParams) -> AnnualSeries:
    """Step LFP forward from ``LFP0`` at ``t0`` under the excess-growth driver.

    Each year solves ``(B1*x + C1) * exp(alpha*(LFP - LFP0)/LFP0) = g(t-T)``
    for the relative change ``x``, evaluating the exponential at the previous
    year's level. Values leaving ``(0, 1]`` are kept and logged.
    """
    _driver_span_check(G, p.t0, p.T)
    g = lag(excess_growth(G, p.A1), p.T).window(p.t0 + 1, G.end_year + p.T)
    out = np.empty(len(g) + 1)
    out[0] = p.LFP0
    for i, drive in enumerate(g.values):
        prev = out[i]
        x = (drive * math.exp(-p.alpha * (prev - p.LFP0) / p.LFP0) - p.C1) / p.B1
        out[i + 1] = prev * (1.0 + x)
    result = AnnualSeries(p.t0, out, label="simulated LFP")
    bad = out_of_range_years(result)
    if bad:
        log.warning("simulated LFP leaves (0, 1] in %d year(s), first %d", len(bad), bad[0])
    return result


def out_of_range_years(LFP: AnnualSeries) -> list[int]:
    """Years where a participation rate falls outside ``(0, 1]``."""
    mask = (LFP.values <= 0) | (LFP.values > 1)
    return [int(y) for y in LFP.years[mask]]


@dataclass(frozen=True)
class ParamCheck:
    steady_state: float
    lower: float
    upper: float

    @property
    def ok(self) -> bool:
        return self.lower <= self.steady_state <= self.upper

    def lines(self) -> list[str]:
        verdict = "ok" if self.ok else "FLAGGED"
        return [
            f"steady_state_rate\t{self.steady_state:.6g}",
            f"bounds\t[{self.lower:g}, {self.upper:g}]",
            f"status\t{verdict}",
            "note\tonly N0/B is identified; (N0, B) -> (k*N0, k*B) gives identical output",
        ]


def check_params(p: GdpModelParams, bounds=STEADY_STATE_BOUNDS) -> ParamCheck:
    """Flag parameter sets whose steady-state rate ``N0/B + C`` is implausible."""
    lo, hi = bounds
    return ParamCheck(p.steady_state, lo, hi)
