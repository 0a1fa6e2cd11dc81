"""Grid search over nonlinear constants with least squares for the affine ones.

Every model family is affine in its remaining constants once the nonlinear
ones (potential constant and lag, or the LFP sensitivity exponent) are fixed,
so each grid point is an exact linear least-squares problem. The smoothing
window is applied to the observed series and to each regressor alike; the
moving average is linear, so a noiseless series generated by the model is
still reproduced exactly.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from labprod.errors import (
    AlignmentError,
    CalibrationError,
    DegeneracyError,
    InsufficientDataError,
    ParameterError,
    UndefinedFitError,
)
from labprod.model import (
    GdpModelParams,
    LfpResponseParams,
    N9ModelParams,
    lfp_response_terms,
    synthetic_population,
)
from labprod.series import AnnualSeries, align, lag, moving_average_centered

MIN_OVERLAP = 8
TIE_RTOL = 1e-12


def grid_values(lo: float, hi: float, step: float) -> list[float]:
    """Inclusive arithmetic grid ``lo, lo+step, ..., <= hi``."""
    if not step > 0:
        raise ParameterError(f"grid step must be positive, got {step}")
    if lo > hi:
        raise ParameterError(f"grid min {lo} exceeds max {hi}")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 10) for i in range(n)]


@dataclass(frozen=True, kw_only=True)
class SearchSpec:
    """Grid ranges as ``(min, max, step)`` plus fixed values and smoothing.

    ``N0`` and ``t0`` pin the synthetic population (only ``N0/B`` is
    identified). ``LFP0`` defaults to the first LFP observation. A window of
    1 fits the raw series.
    """

    a2: tuple[float, float, float] = (200.0, 700.0, 10.0)
    T: tuple[int, int, int] = (0, 4, 1)
    alpha: tuple[float, float, float] = (0.0, 8.0, 0.1)
    N0: float = 1_000_000.0
    t0: int | None = None
    LFP0: float | None = None
    window: int = 5

    def __post_init__(self):
        for name in ("a2", "T", "alpha"):
            grid_values(*getattr(self, name))
        if self.T[0] < 0:
            raise ParameterError("lag grid must start at 0 or later")
        if self.window < 1 or self.window % 2 == 0:
            raise ParameterError(f"window must be a positive odd integer, got {self.window}")
        if not self.N0 > 0:
            raise ParameterError("N0 must be positive")

    @property
    def a2_grid(self) -> list[float]:
        return grid_values(*self.a2)

    @property
    def T_grid(self) -> list[int]:
        return [int(t) for t in grid_values(*self.T)]

    @property
    def alpha_grid(self) -> list[float]:
        return grid_values(*self.alpha)

    def to_dict(self) -> dict[str, Any]:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in dataclasses.asdict(self).items()}


@dataclass(frozen=True)
class TracePoint:
    candidate: dict[str, float]
    sse: float | None
    note: str = ""


@dataclass
class CalibrationResult:
    family: str
    params: Any
    r_squared: float
    sse: float
    observed: AnnualSeries
    predicted: AnnualSeries
    residuals: AnnualSeries
    trace: list[TracePoint]
    spec: SearchSpec
    best_lag: int | None = None
    label: str = ""
    extra: dict[str, Any] = field(default_factory=dict)

    def param_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self.params)

    def summary_lines(self) -> list[str]:
        lines = [f"family\t{self.family}"]
        if self.label:
            lines.append(f"series\t{self.label}")
        for k, v in self.param_dict().items():
            if v is not None:
                lines.append(f"{k}\t{v:.10g}")
        for k, v in self.extra.items():
            lines.append(f"{k}\t{v:.10g}")
        lines.append(f"r_squared\t{self.r_squared:.6f}")
        lines.append(f"sse\t{self.sse:.6e}")
        lines.append(f"span\t{self.observed.start_year}-{self.observed.end_year}")
        if self.best_lag is not None:
            lines.append(f"best_lag\t{self.best_lag}")
        return lines


def ols(X, y) -> tuple[np.ndarray, float]:
    """Least-squares coefficients and residual sum of squares.

    Columns are rescaled to unit max-norm before solving so regressors of
    very different magnitude (head counts next to an intercept) stay well
    conditioned.

    Raises
    ------
    UndefinedFitError
        If the design matrix is rank deficient.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    scale = np.abs(X).max(axis=0)
    scale[scale == 0] = 1.0
    Xs = X / scale
    coef, _, rank, _ = np.linalg.lstsq(Xs, y, rcond=None)
    if rank < X.shape[1]:
        raise UndefinedFitError("regressors are collinear or constant")
    coef = coef / scale
    resid = y - X @ coef
    return coef, float(resid @ resid)


def r_squared(observed: AnnualSeries, predicted: AnnualSeries) -> float:
    """Goodness of fit of ``observed`` regressed on ``predicted`` with an intercept.

    A constant prediction explains nothing and scores 0.
    """
    _, (obs, pred) = align([observed, predicted])
    if len(obs) < 3:
        raise InsufficientDataError(f"R^2 needs at least 3 common years, got {len(obs)}")
    y = obs.values
    sst = float(((y - y.mean()) ** 2).sum())
    if sst == 0.0:
        raise UndefinedFitError("observed series has zero variance")
    x = pred.values
    if np.ptp(x) == 0:
        return 0.0
    _, sse = ols(np.column_stack([x, np.ones_like(x)]), y)
    return 1.0 - sse / sst


def best_lag(observed: AnnualSeries, predicted: AnnualSeries, max_lag: int = 3) -> int | None:
    """Shift ``k`` in ``-max_lag..max_lag`` maximizing corr(observed(t), predicted(t-k)).

    Positive ``k`` means the prediction leads the observation by ``k`` years.
    """
    best = None
    for k in range(-max_lag, max_lag + 1):
        shifted = lag(predicted, k)
        try:
            _, (o, p) = align([observed, shifted])
        except AlignmentError:
            continue
        if len(o) < 3 or np.ptp(o.values) == 0 or np.ptp(p.values) == 0:
            continue
        c = float(np.corrcoef(o.values, p.values)[0, 1])
        if best is None or c > best[0] + 1e-12:
            best = (c, k)
    return None if best is None else best[1]


def _smooth(s: AnnualSeries, window: int) -> AnnualSeries:
    return moving_average_centered(s, window)


@dataclass(frozen=True)
class _Outcome:
    candidate: dict[str, float]
    coef: np.ndarray | None
    sse: float | None
    fitted: np.ndarray | None
    note: str


def _run_grid(
    candidates: Sequence[dict[str, float]],
    evaluate: Callable[[dict[str, float]], tuple[np.ndarray, np.ndarray]],
    workers: int,
) -> list[_Outcome]:
    def one(cand):
        try:
            X, y = evaluate(cand)
            coef, sse = ols(X, y)
            return _Outcome(cand, coef, sse, X @ coef, "")
        except (DegeneracyError, UndefinedFitError, InsufficientDataError) as exc:
            return _Outcome(cand, None, None, None, f"{exc.code}: {exc}")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # map preserves input order, so the trace does not depend on scheduling
            return list(pool.map(one, candidates))
    return [one(c) for c in candidates]


def _select(outcomes: list[_Outcome], order: Callable[[_Outcome], tuple], y: np.ndarray) -> _Outcome:
    """Smallest SSE; SSEs within ``TIE_RTOL * sum(y**2)`` of it tie and fall to ``order``."""
    good = [o for o in outcomes if o.sse is not None]
    if not good:
        notes = {o.note.split(":")[0] for o in outcomes}
        if notes == {UndefinedFitError.code}:
            raise UndefinedFitError("no grid point has an identifiable fit")
        raise CalibrationError(f"every grid point failed ({', '.join(sorted(notes))})")
    floor = min(o.sse for o in good) + TIE_RTOL * float(y @ y)
    return min((o for o in good if o.sse <= floor), key=order)


def _trace(outcomes: list[_Outcome]) -> list[TracePoint]:
    return [TracePoint(o.candidate, o.sse, o.note) for o in outcomes]


def _finish(family, params, best, obs_window, spec, outcomes, label, extra=None):
    predicted = obs_window.with_values(best.fitted, label="predicted")
    r2 = r_squared(obs_window, predicted)
    resid = obs_window.with_values(obs_window.values - best.fitted, label="residual")
    return CalibrationResult(
        family=family,
        params=params,
        r_squared=r2,
        sse=best.sse,
        observed=obs_window,
        predicted=predicted,
        residuals=resid,
        trace=_trace(outcomes),
        spec=spec,
        best_lag=best_lag(obs_window, predicted),
        label=label,
        extra=extra or {},
    )


def _fit_span(obs_s: AnnualSeries, first: int, last: int) -> tuple[int, int]:
    start = max(obs_s.start_year, first)
    end = min(obs_s.end_year, last)
    if end - start + 1 < MIN_OVERLAP:
        raise InsufficientDataError(
            f"only {max(0, end - start + 1)} common years after smoothing and lags; "
            f"need {MIN_OVERLAP}"
        )
    return start, end


def calibrate_gdp_model(
    observed_dpp: AnnualSeries, G: AnnualSeries, spec: SearchSpec = SearchSpec(), workers: int = 1
) -> CalibrationResult:
    """Fit ``A2``, ``T``, ``B`` and ``C`` of the GDP-driven model with ``N0`` fixed.

    Grid points are compared on a common year span, the one every lag on the
    grid can reach. Ties go to the smaller ``A2``, then the smaller ``T``.
    """
    h = spec.window // 2
    obs_s = _smooth(observed_dpp, spec.window)
    t0 = spec.t0 if spec.t0 is not None else G.start_year + max(spec.T_grid)
    lags = [T for T in spec.T_grid if G.start_year <= t0 - T]
    if not lags:
        raise InsufficientDataError(f"G starting {G.start_year} cannot drive t0={t0} at any lag")
    start, end = _fit_span(obs_s, t0 + max(lags) + h, G.end_year + 2 * min(lags) - h)
    y = obs_s.window(start, end).values

    def evaluate(c):
        T = int(c["T"])
        if T not in lags:
            raise InsufficientDataError(f"G does not reach {t0 - T}")
        N = synthetic_population(G, c["A2"], spec.N0, t0, T)
        x = _smooth(lag(N, T), spec.window).window(start, end).values
        return np.column_stack([x, np.ones_like(x)]), y

    cands = [{"A2": a, "T": T} for a in spec.a2_grid for T in spec.T_grid]
    outcomes = _run_grid(cands, evaluate, workers)
    best = _select(outcomes, lambda o: (o.candidate["A2"], o.candidate["T"]), y)
    obs_window = obs_s.window(start, end)
    r_squared(obs_window, obs_window.with_values(best.fitted))  # surfaces undefined fits
    slope, C = best.coef
    if slope == 0:
        raise UndefinedFitError("fitted slope is exactly zero; B is unbounded")
    params = GdpModelParams(
        A2=best.candidate["A2"], B=float(1.0 / slope), C=float(C), N0=spec.N0, T=int(best.candidate["T"]), t0=t0
    )
    return _finish(
        "gdp", params, best, obs_window, spec, outcomes, observed_dpp.label,
        extra={"steady_state": params.steady_state},
    )


def calibrate_n9_model(
    observed_dpp: AnnualSeries, N9: AnnualSeries, spec: SearchSpec = SearchSpec(), workers: int = 1
) -> CalibrationResult:
    """Fit ``T``, ``B`` and ``C`` of ``dP/P = N9(t-T)/B + C``; ties go to the smaller ``T``."""
    h = spec.window // 2
    obs_s = _smooth(observed_dpp, spec.window)
    lags = spec.T_grid
    start, end = _fit_span(obs_s, N9.start_year + max(lags) + h, N9.end_year + min(lags) - h)
    y = obs_s.window(start, end).values

    def evaluate(c):
        x = _smooth(lag(N9, int(c["T"])), spec.window).window(start, end).values
        return np.column_stack([x, np.ones_like(x)]), y

    outcomes = _run_grid([{"T": T} for T in lags], evaluate, workers)
    best = _select(outcomes, lambda o: (o.candidate["T"],), y)
    slope, C = best.coef
    obs_window = obs_s.window(start, end)
    r_squared(obs_window, obs_window.with_values(best.fitted))
    if slope == 0:
        raise UndefinedFitError("fitted slope is exactly zero; B is unbounded")
    params = N9ModelParams(B=float(1.0 / slope), C=float(C), T=int(best.candidate["T"]))
    return _finish("n9", params, best, obs_window, spec, outcomes, observed_dpp.label)


def calibrate_lfp_response(
    observed_dpp: AnnualSeries, LFP: AnnualSeries, spec: SearchSpec = SearchSpec(), workers: int = 1
) -> CalibrationResult:
    """Fit ``alpha`` by grid and ``B2``, ``C2`` by least squares.

    ``LFP0`` is ``spec.LFP0`` or, failing that, the LFP value at ``spec.t0``
    (default: the first LFP year). Ties go to the smaller ``|alpha|``.
    """
    t0 = spec.t0 if spec.t0 is not None else LFP.start_year
    LFP0 = spec.LFP0 if spec.LFP0 is not None else LFP[t0]
    h = spec.window // 2
    obs_s = _smooth(observed_dpp, spec.window)
    start, end = _fit_span(obs_s, LFP.start_year + 1 + h, LFP.end_year - h)
    y = obs_s.window(start, end).values

    def evaluate(c):
        re, e = lfp_response_terms(LFP, c["alpha"], LFP0)
        cols = [_smooth(s, spec.window).window(start, end).values for s in (re, e)]
        return np.column_stack(cols), y

    outcomes = _run_grid([{"alpha": a} for a in spec.alpha_grid], evaluate, workers)
    best = _select(outcomes, lambda o: (abs(o.candidate["alpha"]), o.candidate["alpha"]), y)
    obs_window = obs_s.window(start, end)
    r_squared(obs_window, obs_window.with_values(best.fitted))
    B2, C2 = best.coef
    params = LfpResponseParams(B2=float(B2), C2=float(C2), alpha=best.candidate["alpha"], LFP0=LFP0, t0=t0)
    return _finish("lfp", params, best, obs_window, spec, outcomes, observed_dpp.label)


def calibrate_each(
    calibrate: Callable[..., CalibrationResult],
    observed: dict[str, AnnualSeries],
    driver: AnnualSeries,
    spec: SearchSpec = SearchSpec(),
    workers: int = 1,
) -> dict[str, CalibrationResult]:
    """Run one calibration per observed series (e.g. per-hour and per-person)."""
    return {name: calibrate(obs, driver, spec, workers) for name, obs in observed.items()}
