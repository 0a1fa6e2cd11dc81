"""Command-line entry point.

Precedence for every setting: command-line flags > configuration file > defaults.

Exit status: 0 success, 2 configuration error, 3 data error,
4 model degeneracy, 5 calibration failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from labprod import __version__
from labprod.calibration import (
    calibrate_gdp_model,
    calibrate_lfp_response,
    calibrate_n9_model,
    r_squared,
)
from labprod.dataio import (
    DEMO_GDP_PATH,
    generate_synthetic_country,
    load_config,
    write_config,
    write_fit_csv,
    write_report,
    write_series_csv,
    write_summary,
)
from labprod.errors import ConfigError, LabprodError
from labprod.forecast import forecast_productivity
from labprod.model import (
    COUNTRY_PRESETS,
    GdpModelParams,
    LfpResponseParams,
    LfpSimParams,
    N9ModelParams,
    check_params,
    productivity_from_g,
    productivity_from_lfp,
    productivity_from_n9,
    simulate_lfp,
    synthetic_population,
)
from labprod.series import moving_average_centered

def _emit(lines):
    for line in lines:
        print(line)


def _param_overrides(pairs) -> dict[str, float]:
    out = {}
    for item in pairs or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects KEY=VALUE, got {item!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"--param {key}: not a number: {value!r}") from None
    return out


def _build_params(family: str, values: dict[str, float]):
    def need(*keys):
        missing = [k for k in keys if k not in values]
        if missing:
            raise ConfigError(f"[params] missing {', '.join(missing)} for family {family}")

    if family == "gdp":
        need("A2", "B", "C", "N0")
        kw = {k: values[k] for k in ("A2", "B", "C", "N0")}
        for k in ("T", "t0"):
            if k in values:
                kw[k] = int(values[k])
        return GdpModelParams(**kw)
    if family == "n9":
        need("B", "C")
        return N9ModelParams(B=values["B"], C=values["C"], T=int(values.get("T", 2)))
    need("B2", "C2", "alpha")
    return values  # LFP0 may depend on the data; resolved by the caller


def _load(args):
    if not args.config:
        raise ConfigError(f"{args.command} requires --config")
    overrides = {"family": args.family, "window": args.window, "out": args.out, "workers": args.workers}
    cfg = load_config(args.config, overrides)
    cfg.params.update(_param_overrides(getattr(args, "param", None)))
    return cfg, cfg.load_dataset()


def _require(value, what: str, family: str):
    if value is None:
        raise ConfigError(f"family {family} needs [data] {what}")
    return value


def _observed(ds, family):
    if not ds.observed:
        raise ConfigError(f"family {family} needs at least one [data] dpp series")
    return ds.observed


def _n9_series(ds, family):
    if ds.N9 is not None:
        return ds.N9
    if ds.population is not None and ds.population.cohort(9):
        return ds.population.cohort_series(9)
    raise ConfigError(f"family {family} needs [data] n9 or a population table with age 9")


def cmd_calibrate(args) -> int:
    cfg, ds = _load(args)
    family = cfg.family
    if family == "gdp":
        driver = _require(ds.G, "gdp", family)
        fit = calibrate_gdp_model
    elif family == "lfp":
        driver = _require(ds.LFP, "lfp", family)
        fit = calibrate_lfp_response
    else:
        driver = _n9_series(ds, family)
        fit = calibrate_n9_model
    observed = _observed(ds, family)
    many = len(observed) > 1
    for name, obs in observed.items():
        result = fit(obs, driver, cfg.search, workers=cfg.workers)
        out = cfg.out / name if many else cfg.out
        write_report(result, out)
        if many:
            print(f"[{name}]")
        _emit(result.summary_lines())
    return 0


def _lfp_prediction(cfg, ds):
    values = cfg.params
    lfp = ds.LFP
    if lfp is None:
        sim_keys = ("A1", "B1", "C1", "alpha", "LFP0", "t0")
        if ds.G is None or not all(k in values for k in sim_keys):
            raise ConfigError(
                "family lfp needs [data] lfp, or [data] gdp with A1, B1, C1, alpha, LFP0, t0 in [params]"
            )
        sim = LfpSimParams(
            A1=values["A1"], B1=values["B1"], C1=values["C1"], alpha=values["alpha"],
            LFP0=values["LFP0"], t0=int(values["t0"]), T=int(values.get("T", 2)),
        )
        lfp = simulate_lfp(ds.G, sim)
    _build_params("lfp", values)
    t0 = int(values.get("t0", lfp.start_year))
    p = LfpResponseParams(
        B2=values["B2"], C2=values["C2"], alpha=values["alpha"],
        LFP0=values.get("LFP0", lfp[t0]), t0=t0,
    )
    return productivity_from_lfp(lfp, p), {"lfp": lfp}


def _predict(cfg, ds):
    """Raw model prediction plus auxiliary paths worth writing out."""
    family = cfg.family
    if family == "gdp":
        G = _require(ds.G, "gdp", family)
        p = _build_params("gdp", cfg.params)
        return productivity_from_g(G, p), {"n_path": synthetic_population(G, p.A2, p.N0, p.t0, p.T)}
    if family == "n9":
        return productivity_from_n9(_n9_series(ds, family), _build_params("n9", cfg.params)), {}
    return _lfp_prediction(cfg, ds)


def _fit_rows(cfg, ds, predicted):
    """Smoothed observed and predicted series for each observed definition."""
    pred_s = moving_average_centered(predicted, cfg.window)
    rows = {}
    for name, obs in ds.observed.items():
        rows[name] = (moving_average_centered(obs, cfg.window), pred_s)
    return rows


def cmd_simulate(args) -> int:
    cfg, ds = _load(args)
    predicted, aux = _predict(cfg, ds)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_series_csv(predicted, cfg.out / "prediction.csv")
    for name, s in aux.items():
        write_series_csv(s, cfg.out / f"{name}.csv")
    many = len(ds.observed) > 1
    for name, (obs_s, pred_s) in _fit_rows(cfg, ds, predicted).items():
        write_fit_csv(obs_s, pred_s, cfg.out / (f"fit_{name}.csv" if many else "fit.csv"))
    write_summary(
        {"family": cfg.family, "kind": "simulation", "params": cfg.params, "window": cfg.window},
        cfg.out,
    )
    _emit([
        f"family\t{cfg.family}",
        f"prediction_span\t{predicted.start_year}-{predicted.end_year}",
        f"prediction_min\t{predicted.values.min():.6g}",
        f"prediction_max\t{predicted.values.max():.6g}",
    ])
    return 0


def cmd_evaluate(args) -> int:
    cfg, ds = _load(args)
    _observed(ds, cfg.family)
    predicted, _ = _predict(cfg, ds)
    cfg.out.mkdir(parents=True, exist_ok=True)
    scores = {}
    many = len(ds.observed) > 1
    for name, (obs_s, pred_s) in _fit_rows(cfg, ds, predicted).items():
        scores[name] = r_squared(obs_s, pred_s)
        write_fit_csv(obs_s, pred_s, cfg.out / (f"fit_{name}.csv" if many else "fit.csv"))
    write_summary(
        {"family": cfg.family, "kind": "evaluation", "params": cfg.params, "window": cfg.window,
         "r_squared": scores},
        cfg.out,
    )
    _emit([f"family\t{cfg.family}"] + [f"r_squared[{k}]\t{v:.6f}" for k, v in scores.items()])
    return 0


def cmd_forecast(args) -> int:
    cfg, ds = _load(args)
    if ds.population is None:
        raise ConfigError("forecast needs [data] population (year,age,count)")
    p = _build_params("n9", cfg.params)
    last = args.last_observed_year if args.last_observed_year is not None else cfg.last_observed_year
    fc = forecast_productivity(ds.population, p, last)
    write_report(fc, cfg.out)
    _emit(fc.summary_lines())
    return 0


def _preset_or_params(args) -> GdpModelParams:
    values = {}
    if args.config:
        values.update(load_config(args.config).params)
    if args.preset:
        values.update({k: float(v) for k, v in dataclasses.asdict(COUNTRY_PRESETS[args.preset]).items()})
    values.update(_param_overrides(args.param))
    if not values:
        raise ConfigError("give --preset, --config with [params], or --param KEY=VALUE")
    return _build_params("gdp", values)


def cmd_check_params(args) -> int:
    p = _preset_or_params(args)
    _emit(check_params(p).lines())
    return 0


def cmd_synth(args) -> int:
    if args.config:
        cfg = load_config(args.config)
        true = _build_params("gdp", cfg.params)
    else:
        true = COUNTRY_PRESETS[args.preset or "france"]
        extra = _param_overrides(args.param)
        if extra:
            true = _build_params("gdp", {**{k: float(v) for k, v in dataclasses.asdict(true).items()}, **extra})
    path = dataclasses.replace(DEMO_GDP_PATH, start_year=true.t0 - 4)
    ds = generate_synthetic_country(true, path, args.noise, args.seed, name=args.preset or "synthetic")
    out = Path(args.out or "synth")
    out.mkdir(parents=True, exist_ok=True)
    write_series_csv(ds.G, out / "gdp.csv")
    obs = ds.observed["per-person"]
    write_series_csv(obs, out / "dpp.csv")
    write_config(
        out / "config.ini",
        data={"name": ds.name, "gdp": "gdp.csv", "dpp": "dpp.csv"},
        run={"family": "gdp", "out": "results", "window": args.window or 5},
        search={"a2": "300, 600, 10", "T": "0, 4, 1", "N0": repr(float(true.N0)), "t0": true.t0},
        params={k: v if isinstance(v, int) else repr(float(v)) for k, v in dataclasses.asdict(true).items()},
    )
    _emit([
        f"gdp_span\t{ds.G.start_year}-{ds.G.end_year}",
        f"dpp_span\t{obs.start_year}-{obs.end_year}",
        f"noise_sigma\t{args.noise:g}",
        f"seed\t{args.seed}",
        f"config\t{out / 'config.ini'}",
    ])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="labprod",
        description="Calibrate, simulate and forecast labor productivity growth. "
        "Flags override configuration-file values, which override defaults.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=False):
        p.add_argument("--config", required=config_required, help="INI run configuration")
        p.add_argument("--family", choices=("gdp", "lfp", "n9"), help="model family")
        p.add_argument("--window", type=int, help="centered moving-average window (odd, default 5)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--workers", type=int, help="threads for the grid search (default 1)")
        p.add_argument("--param", action="append", metavar="KEY=VALUE", help="override a [params] value")

    p = sub.add_parser("calibrate", help="fit model constants to observed productivity growth")
    common(p, True)
    p.set_defaults(func=cmd_calibrate)
    p = sub.add_parser("simulate", help="evaluate the model with given constants")
    common(p, True)
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("evaluate", help="R^2 of given constants against observations")
    common(p, True)
    p.set_defaults(func=cmd_evaluate)
    p = sub.add_parser("forecast", help="cohort-shift productivity forecast")
    common(p, True)
    p.add_argument("--last-observed-year", type=int, help="forecast only years after this one")
    p.set_defaults(func=cmd_forecast)
    p = sub.add_parser("synth", help="write a synthetic country dataset and config")
    common(p)
    p.add_argument("--preset", choices=sorted(COUNTRY_PRESETS), help="true parameters (default france)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0, help="Gaussian noise sigma on dP/P")
    p.set_defaults(func=cmd_synth)
    p = sub.add_parser("check-params", help="steady-state sanity check of GDP-model constants")
    p.add_argument("--config")
    p.add_argument("--preset", choices=sorted(COUNTRY_PRESETS))
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_check_params)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except LabprodError as exc:
        print(f"labprod: error[{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_status
    except OSError as exc:
        print(f"labprod: error[io]: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
