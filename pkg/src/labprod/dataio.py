"""File formats: series and population CSVs, run configuration, reports.

Series CSV::

    year,value
    1990,100.0

Population CSV::

    year,age,count
    2000,9,4012345

Run configuration is an INI file; see ``load_config`` for the keys.
"""

from __future__ import annotations

import configparser
import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from labprod import __version__
from labprod.calibration import CalibrationResult, SearchSpec
from labprod.errors import ConfigError, DomainError, GenerationError, LoadError
from labprod.forecast import ForecastSeries, PopulationTable
from labprod.model import GdpModelParams, productivity_from_g
from labprod.series import AnnualSeries

FAMILIES = ("gdp", "lfp", "n9")


def _fmt(x: float) -> str:
    return repr(float(x))


def _parse_int(text: str, path, lineno: int, what: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise LoadError(f"{path}:{lineno}: cannot parse {what} {text!r}") from None


def _parse_float(text: str, path, lineno: int, what: str) -> float:
    t = text.strip()
    try:
        value = float(t)
    except ValueError:
        raise LoadError(f"{path}:{lineno}: cannot parse {what} {text!r}") from None
    if not math.isfinite(value):
        raise LoadError(f"{path}:{lineno}: {what} must be finite, got {text!r}")
    return value


def _read_rows(path, header: list[str]):
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise LoadError(f"{path}: {exc.strerror or exc}") from None
    with fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or [c.strip().lower() for c in first] != header:
            raise LoadError(f"{path}:1: expected header {','.join(header)!r}")
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise LoadError(
                    f"{path}:{reader.line_num}: expected {len(header)} fields, got {len(row)}"
                )
            yield reader.line_num, row


def read_series_csv(path, label: str | None = None) -> AnnualSeries:
    """Read a ``year,value`` CSV with consecutive ascending years."""
    years, values = [], []
    for lineno, (y, v) in _read_rows(path, ["year", "value"]):
        year = _parse_int(y, path, lineno, "year")
        if years:
            if year == years[-1]:
                raise LoadError(f"{path}:{lineno}: duplicate year {year}")
            if year < years[-1]:
                raise LoadError(f"{path}:{lineno}: year {year} out of order")
            if year != years[-1] + 1:
                raise LoadError(f"{path}:{lineno}: gap after {years[-1]}")
        years.append(year)
        values.append(_parse_float(v, path, lineno, "value"))
    if not years:
        raise LoadError(f"{path}: no data rows")
    return AnnualSeries(years[0], values, label if label is not None else Path(path).stem)


def write_series_csv(s: AnnualSeries, path):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["year", "value"])
        for year, v in s.items():
            w.writerow([year, _fmt(v)])


def read_population_csv(path) -> PopulationTable:
    """Read a ``year,age,count`` CSV; duplicates and negative counts are errors."""
    table = PopulationTable()
    for lineno, (y, a, c) in _read_rows(path, ["year", "age", "count"]):
        year = _parse_int(y, path, lineno, "year")
        age = _parse_int(a, path, lineno, "age")
        count = _parse_float(c, path, lineno, "count")
        if count < 0:
            raise LoadError(f"{path}:{lineno}: negative count {c.strip()}")
        try:
            table.add(year, age, count)
        except DomainError as exc:
            raise LoadError(f"{path}:{lineno}: {exc}") from None
    return table


def write_population_csv(table: PopulationTable, path):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["year", "age", "count"])
        for year, age, count in table.rows():
            w.writerow([year, age, _fmt(count)])


@dataclass
class CountryDataset:
    """Inputs for one country.

    ``observed`` maps a productivity definition (``per-hour``,
    ``per-person``) to its growth-rate series; each series label names the
    source.
    """

    name: str
    G: AnnualSeries | None
    observed: dict[str, AnnualSeries] = field(default_factory=dict)
    LFP: AnnualSeries | None = None
    N9: AnnualSeries | None = None
    population: PopulationTable | None = None


@dataclass(frozen=True, kw_only=True)
class GdpPath:
    """Deterministic GDP-per-capita path: linear trend plus optional sinusoid.

    ``G(t) = level + trend*(t - start_year) + amplitude*sin(2*pi*(t - start_year)/period)``
    """

    start_year: int
    years: int
    level: float
    trend: float
    amplitude: float = 0.0
    period: float = 10.0

    def build(self) -> AnnualSeries:
        k = np.arange(self.years, dtype=float)
        g = self.level + self.trend * k
        if self.amplitude:
            g = g + self.amplitude * np.sin(2 * np.pi * k / self.period)
        if self.years < 2 or np.any(g <= 0):
            raise GenerationError("GDP path must span 2+ years and stay positive")
        return AnnualSeries(self.start_year, g, label="G (synthetic)")


# 45 years with a pronounced ten-year cycle; the cycle is what makes the
# potential constant identifiable separately from the intercept under noise
DEMO_GDP_PATH = GdpPath(start_year=1955, years=45, level=5000.0, trend=300.0, amplitude=1500.0, period=10.0)


def generate_synthetic_country(
    true_params: GdpModelParams,
    path: GdpPath,
    noise_sigma: float = 0.0,
    seed: int = 0,
    name: str = "synthetic",
) -> CountryDataset:
    """Country whose observed productivity growth is the GDP model plus Gaussian noise.

    Observations are kept only for years the GDP path covers.
    """
    if not noise_sigma >= 0:
        raise GenerationError(f"noise sigma must be >= 0, got {noise_sigma}")
    G = path.build()
    clean = productivity_from_g(G, true_params)
    clean = clean.window(clean.start_year, min(clean.end_year, G.end_year))
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, noise_sigma, len(clean)) if noise_sigma > 0 else 0.0
    obs = clean.with_values(clean.values + noise, label=f"synthetic sigma={noise_sigma:g} seed={seed}")
    return CountryDataset(name=name, G=G, observed={"per-person": obs})


# --------------------------------------------------------------------------
# run configuration


@dataclass
class RunConfig:
    path: Path
    name: str
    family: str
    gdp: Path | None
    observed: dict[str, Path]
    lfp: Path | None
    n9: Path | None
    population: Path | None
    out: Path
    window: int
    workers: int
    search: SearchSpec
    params: dict[str, float]
    last_observed_year: int | None = None

    def load_dataset(self) -> CountryDataset:
        observed = {k: read_series_csv(p, label=k) for k, p in self.observed.items()}
        return CountryDataset(
            name=self.name,
            G=read_series_csv(self.gdp, "G") if self.gdp else None,
            observed=observed,
            LFP=read_series_csv(self.lfp, "LFP") if self.lfp else None,
            N9=read_series_csv(self.n9, "N9") if self.n9 else None,
            population=read_population_csv(self.population) if self.population else None,
        )


def _triple(text: str, key: str) -> tuple[float, float, float]:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"[search] {key}: expected 'min, max, step', got {text!r}") from None
    if len(vals) == 1:
        vals = (vals[0], vals[0], 1.0)
    if len(vals) != 3:
        raise ConfigError(f"[search] {key}: expected 'min, max, step', got {text!r}")
    return vals


def _number(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{where}: not a number: {text!r}") from None


def load_config(path, overrides: dict | None = None) -> RunConfig:
    """Parse an INI run configuration.

    Sections and keys::

        [data]    name, gdp, lfp, n9, population, dpp, dpp.<definition>
        [run]     family (gdp|lfp|n9), out, window, workers, last_observed_year
        [search]  a2, T, alpha as "min, max, step"; N0, t0, LFP0
        [params]  model constants for simulate/evaluate/forecast/check-params

    Relative paths resolve against the configuration file's directory.
    ``overrides`` (from command-line flags) take precedence over the file.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"configuration file not found: {path}")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    base = path.parent
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}

    def get(section, key, default=None):
        if cp.has_option(section, key):
            value = cp.get(section, key).strip()
            return value if value else default
        return default

    def data_path(key):
        value = get("data", key)
        if value is None:
            return None
        p = (base / value).resolve()
        if not p.exists():
            raise ConfigError(f"[data] {key}: file not found: {p}")
        return p

    family = overrides.get("family", get("run", "family", "gdp"))
    if family not in FAMILIES:
        raise ConfigError(f"[run] family must be one of {', '.join(FAMILIES)}, got {family!r}")

    observed = {}
    if cp.has_section("data"):
        for key in cp.options("data"):
            if key == "dpp" or key.startswith("dpp."):
                definition = key[4:] if key.startswith("dpp.") else "observed"
                p = data_path(key)
                if p is not None:
                    observed[definition] = p

    window = int(overrides.get("window", _number(get("run", "window", "5"), "[run] window")))
    search_kw = {"window": window}
    for key in ("a2", "T", "alpha"):
        if get("search", key) is not None:
            search_kw[key] = _triple(get("search", key), key)
    if "T" in search_kw:
        search_kw["T"] = tuple(int(v) for v in search_kw["T"])
    for key in ("N0", "LFP0"):
        if get("search", key) is not None:
            search_kw[key] = _number(get("search", key), f"[search] {key}")
    if get("search", "t0") is not None:
        search_kw["t0"] = int(_number(get("search", "t0"), "[search] t0"))
    search = SearchSpec(**search_kw)

    params = {}
    if cp.has_section("params"):
        params = {k: _number(v, f"[params] {k}") for k, v in cp.items("params") if v.strip()}

    out = overrides.get("out") or get("run", "out", "out")
    last_obs = get("run", "last_observed_year")
    return RunConfig(
        path=path,
        name=get("data", "name", path.stem),
        family=family,
        gdp=data_path("gdp"),
        observed=observed,
        lfp=data_path("lfp"),
        n9=data_path("n9"),
        population=data_path("population"),
        out=(base / out).resolve() if "out" not in overrides else Path(out),
        window=window,
        workers=int(overrides.get("workers", _number(get("run", "workers", "1"), "[run] workers"))),
        search=search,
        params=params,
        last_observed_year=int(_number(last_obs, "[run] last_observed_year")) if last_obs else None,
    )


def write_config(path, *, data: dict, run: dict, search: dict | None = None, params: dict | None = None):
    cp = configparser.ConfigParser()
    cp.optionxform = str
    for name, section in (("data", data), ("run", run), ("search", search), ("params", params)):
        if section:
            cp[name] = {k: str(v) for k, v in section.items()}
    with Path(path).open("w", encoding="utf-8") as fh:
        cp.write(fh)


# --------------------------------------------------------------------------
# reports


def _param_json(params) -> dict:
    from dataclasses import asdict

    return {k: v for k, v in asdict(params).items() if v is not None}


def _write_json(obj, path):
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_fit_csv(observed: AnnualSeries | None, predicted: AnnualSeries, path):
    """``year,observed,predicted,residual``; observed and residual blank where unavailable."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["year", "observed", "predicted", "residual"])
        for year, p in predicted.items():
            if observed is not None and year in observed:
                o = observed[year]
                w.writerow([year, _fmt(o), _fmt(p), _fmt(o - p)])
            else:
                w.writerow([year, "", _fmt(p), ""])


def calibration_summary(result: CalibrationResult) -> dict:
    return {
        "family": result.family,
        "series": result.label,
        "params": _param_json(result.params),
        "r_squared": result.r_squared,
        "sse": result.sse,
        "window": result.spec.window,
        "grid": result.spec.to_dict(),
        "span": [result.observed.start_year, result.observed.end_year],
        "best_lag": result.best_lag,
        "grid_points": len(result.trace),
        "grid_skipped": sum(1 for t in result.trace if t.sse is None),
        "version": __version__,
    }


def write_report(result: CalibrationResult | ForecastSeries, directory, timestamp: bool = False) -> list[Path]:
    """Write ``summary.json`` plus ``fit.csv`` (calibration) or ``forecast.csv``.

    Also writes ``trace.csv`` for calibrations. Output is byte-identical
    across reruns unless ``timestamp`` is set.
    """
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    if isinstance(result, CalibrationResult):
        summary = calibration_summary(result)
        write_fit_csv(result.observed, result.predicted, d / "fit.csv")
        with (d / "trace.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            keys = list(result.trace[0].candidate) if result.trace else []
            w.writerow(keys + ["sse", "note"])
            for t in result.trace:
                w.writerow([_fmt(t.candidate[k]) for k in keys] + ["" if t.sse is None else _fmt(t.sse), t.note])
        written += [d / "fit.csv", d / "trace.csv"]
    elif isinstance(result, ForecastSeries):
        summary = {
            "family": "n9",
            "kind": "forecast",
            "params": _param_json(result.params),
            "last_measured_9yo": result.last_measured_year,
            "horizon_years": result.horizon,
            "version": __version__,
        }
        with (d / "forecast.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["year", "dpp", "provenance"])
            for p in result.points:
                w.writerow([p.year, _fmt(p.dpp), p.provenance])
        written.append(d / "forecast.csv")
    else:
        raise TypeError(f"cannot report {type(result).__name__}")
    if timestamp:
        from datetime import datetime, timezone

        summary["timestamp"] = datetime.now(timezone.utc).isoformat()
    _write_json(summary, d / "summary.json")
    written.append(d / "summary.json")
    return written


def write_summary(summary: dict, directory):
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    summary = dict(summary, version=__version__)
    _write_json(summary, d / "summary.json")
    return d / "summary.json"
