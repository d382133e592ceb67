"""Command-line interface: ``cti fit|classify|project|rate|policy|report``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import reference
from .calibration import calibrate_country, fitted_values
from .dataio import (
    RunConfig,
    curve_params,
    load_run_config,
    load_series,
    read_params,
    save_params,
    write_params,
    write_table,
)
from .ema import classify, cti_from_share, share_from_cti
from .errors import CTIError
from .plotting import emit_plot
from .policy import SCENARIO_COLUMNS, PolicyEvent, Scenario, compare_scenarios, project_policy
from .rates import RateSample, rate_profile
from .share import log_odds

__all__ = ["main", "run", "emit_plot"]

log = logging.getLogger("cashless_cti")

PROJECT_COLUMNS = ("t", "y", "p", "cti", "region")


class UsageError(Exception):
    pass


def _common(parser, need_input=False):
    parser.add_argument("--config", help="run configuration JSON (falls back to $CTI_CONFIG)")
    parser.add_argument("--input", required=need_input, help="CSV with header country,year,share")
    parser.add_argument("--unit", choices=("fraction", "percent"),
                        help="unit of the share column (default from config: fraction)")
    parser.add_argument("--out", help="output directory; without it tables go to stdout")


def _grid_flags(parser, start=0.0, stop=60.0, step=1.0):
    parser.add_argument("--params", required=True,
                        help="parameter/report/scenario document, or builtin:<Country>")
    parser.add_argument("--from", dest="t_from", type=float, default=start,
                        help=f"first model time in years (default {start:g})")
    parser.add_argument("--to", dest="t_to", type=float, default=stop,
                        help=f"last model time in years (default {stop:g})")
    parser.add_argument("--step", type=float, default=step,
                        help=f"grid spacing in years (default {step:g})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cti",
        description="Cashless transaction index: fitting, grading, forecasting and policy scenarios.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="{fit,classify,project,rate,policy,report}")
    sub.required = True

    p = sub.add_parser("fit", help="calibrate the share curve of one country")
    _common(p, need_input=True)
    p.add_argument("--country", required=True, help="country name as it appears in the CSV")
    p.add_argument("--model", choices=("auto", "linear", "quadratic"), default="auto",
                   help="transform model; auto picks the larger R^2")
    p.add_argument("--gamma", type=float, help="gamma used for linear-class countries")

    p = sub.add_parser("classify", help="CTI and region for a share, a CTI value or a CSV")
    _common(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--share", type=float, help="cashless share in [0,1]")
    g.add_argument("--cti", type=float, help="CTI value in [0,10]")

    p = sub.add_parser("project", help="share and CTI trajectory from curve parameters")
    _common(p)
    _grid_flags(p)

    p = sub.add_parser("rate", help="CTI growth rate profile")
    _common(p)
    _grid_flags(p)

    p = sub.add_parser("policy", help="policy scenarios on top of baseline parameters")
    _common(p)
    p.add_argument("--params", help="baseline document or builtin:<Country>")
    p.add_argument("--from", dest="t_from", type=float, default=0.0,
                   help="first model time in years (default 0)")
    p.add_argument("--to", dest="t_to", type=float, default=40.0,
                   help="last model time in years (default 40)")
    p.add_argument("--step", type=float, default=1.0, help="grid spacing in years (default 1)")
    p.add_argument("--epsilon", type=float, action="append", default=[],
                   help="policy impact (1/year); repeat with --ti/--omega for each event")
    p.add_argument("--ti", type=float, action="append", default=[], help="policy start time (years)")
    p.add_argument("--omega", type=float, action="append", default=[], help="ramp width (years)")
    p.add_argument("--mode", choices=("cumulative", "sweep"), default="cumulative",
                   help="cumulative: all events in one scenario compared with the baseline; "
                        "sweep: one scenario per event")
    p.add_argument("--scenario", action="append", default=[],
                   help="scenario document (repeatable); used instead of --params/event flags")

    p = sub.add_parser("report", help="fit, project and rate every country in the input")
    _common(p, need_input=True)
    p.add_argument("--model", choices=("auto", "linear", "quadratic"), default="auto",
                   help="transform model for every country; auto picks the larger R^2")
    p.add_argument("--gamma", type=float, help="gamma used for linear-class countries")
    p.add_argument("--horizon", type=float, default=60.0, help="projection length in years (default 60)")
    return parser


def _config(args) -> RunConfig:
    path = args.config or os.environ.get("CTI_CONFIG")
    return load_run_config(path) if path else RunConfig()


def _grid(start, stop, step):
    if not step > 0:
        raise UsageError("--step must be positive")
    if stop < start:
        raise UsageError("--to must not be smaller than --from")
    n = int(round((stop - start) / step))
    return [start + k * step for k in range(n + 1)]


def _params(source):
    if source.startswith("builtin:"):
        try:
            return reference.lookup(source.split(":", 1)[1])
        except KeyError as exc:
            raise CTIError(exc.args[0]) from None
    return curve_params(read_params(source))


def _emit_table(rows, columns, args, name):
    if args.out:
        n = write_table(rows, Path(args.out) / name, columns)
        log.info("wrote %s (%d bytes)", Path(args.out) / name, n)
    else:
        write_table(rows, sys.stdout, columns)


def _series(args, cfg):
    unit = args.unit or cfg.share_unit
    with open(args.input, "rb") as fh:
        return load_series(fh, unit)


def _projection_rows(params, grid, ema):
    rows = []
    base = Scenario(params)
    for t in grid:
        y, p, cti = project_policy(t, base, ema)
        rows.append((t, y, p, cti, classify(cti).name))
    return rows


def cmd_classify(args, cfg):
    ema = cfg.ema
    if args.share is not None:
        cti = cti_from_share(args.share, ema)
        print(f"CTI {cti:.4f}")
        print(f"region {classify(cti).name}")
        return 0
    if args.cti is not None:
        p = share_from_cti(args.cti, ema)
        print(f"share {p:.6f}")
        print(f"region {classify(args.cti).name}")
        return 0
    if not args.input:
        raise UsageError("classify needs --share, --cti or --input")
    rows = []
    for s in _series(args, cfg):
        for year, p in s.observations:
            cti = cti_from_share(p, ema)
            rows.append((s.country, year, p, cti, classify(cti).name))
    _emit_table(rows, ("country", "year", "share", "cti", "region"), args, "classify.csv")
    return 0


def _pick_country(series_list, name):
    for s in series_list:
        if s.country == name:
            return s
    for s in series_list:
        if s.country.lower() == name.lower():
            return s
    raise CTIError(f"country {name!r} not found in input")


def _fit_plot(report, series, path):
    years = series.years
    data = [(yr, log_odds(p)) for yr, p in series.observations]
    curves = {f"{series.country} data": data,
              "linear fit": list(zip(years, fitted_values(report.linear, years)))}
    if report.quadratic is not None:
        curves["quadratic fit"] = list(zip(years, fitted_values(report.quadratic, years)))
    emit_plot(curves, path, title=f"{series.country}: ln(1/p - 1)", xlabel="year", ylabel="ln(1/p - 1)")


def cmd_fit(args, cfg):
    series = _pick_country(_series(args, cfg), args.country)
    gamma = args.gamma if args.gamma is not None else cfg.gamma_default
    report = calibrate_country(series, gamma, cfg.T_years, args.model, cfg.z)
    if args.out:
        out = Path(args.out)
        write_params(report, out / f"{series.country}_calibration.json")
        _fit_plot(report, series, out / f"{series.country}_fit.svg")
        p = report.params
        print(f"{series.country}: {report.selected} model, alpha={p.alpha:.6g} beta={p.beta:.6g} "
              f"gamma={p.gamma:.6g} delta_t0={p.delta_t0_years:.6g}")
    else:
        sys.stdout.write(save_params(report))
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_project(args, cfg):
    params = _params(args.params)
    rows = _projection_rows(params, _grid(args.t_from, args.t_to, args.step), cfg.ema)
    _emit_table(rows, PROJECT_COLUMNS, args, "project.csv")
    if args.out:
        emit_plot({"CTI": [(r[0], r[3]) for r in rows]}, Path(args.out) / "project.svg",
                  title="Projected CTI", ylabel="CTI")
    return 0


def cmd_rate(args, cfg):
    params = _params(args.params)
    samples = rate_profile(params, cfg.ema, _grid(args.t_from, args.t_to, args.step))
    _emit_table([s.row() for s in samples], RateSample.COLUMNS, args, "rate.csv")
    if args.out:
        emit_plot({"dCTI/dt": [(s.t_years, s.dcti_dt) for s in samples]}, Path(args.out) / "rate.svg",
                  title="CTI growth rate", ylabel="dCTI/dt (1/year)")
    return 0


def _scenarios(args):
    if args.scenario:
        return [read_params(path) for path in args.scenario]
    if not args.params:
        raise UsageError("policy needs --params or --scenario")
    if not (len(args.epsilon) == len(args.ti) == len(args.omega)):
        raise UsageError("--epsilon, --ti and --omega must be given the same number of times")
    base = _params(args.params)
    events = [PolicyEvent(e, ti, w) for e, ti, w in zip(args.epsilon, args.ti, args.omega)]
    if args.mode == "sweep":
        if not events:
            raise UsageError("sweep mode needs at least one --epsilon/--ti/--omega triplet")
        return [Scenario(base, (e,), f"eps={e.epsilon:g}") for e in events]
    out = [Scenario(base, (), "baseline")]
    if events:
        out.append(Scenario(base, tuple(events), "policy"))
    return out


def cmd_policy(args, cfg):
    scenarios = _scenarios(args)
    for i, s in enumerate(scenarios):
        if not isinstance(s, Scenario):
            raise CTIError(f"--scenario #{i + 1} is not a scenario document")
    rows = compare_scenarios(scenarios, _grid(args.t_from, args.t_to, args.step), cfg.ema)
    _emit_table(rows, SCENARIO_COLUMNS, args, "policy.csv")
    if args.out:
        labels = []
        for r in rows:
            if r[0] not in labels:
                labels.append(r[0])
        out = Path(args.out)
        emit_plot({lab: [(r[1], r[2]) for r in rows if r[0] == lab] for lab in labels},
                  out / "policy_y.svg", title="Policy scenarios", ylabel="ln(1/p - 1)")
        emit_plot({lab: [(r[1], r[4]) for r in rows if r[0] == lab] for lab in labels},
                  out / "policy_cti.svg", title="Policy scenarios", ylabel="CTI")
    return 0


def cmd_report(args, cfg):
    if not args.out:
        raise UsageError("report needs --out")
    out = Path(args.out)
    gamma = args.gamma if args.gamma is not None else cfg.gamma_default
    grid = _grid(0.0, args.horizon, 1.0)
    summary, failed = [], []
    for series in _series(args, cfg):
        name = series.country
        try:
            report = calibrate_country(series, gamma, cfg.T_years, args.model, cfg.z)
        except CTIError as exc:
            print(f"error: {name}: {exc}", file=sys.stderr)
            failed.append(name)
            continue
        params = report.params
        write_params(report, out / f"{name}_calibration.json")
        _fit_plot(report, series, out / f"{name}_fit.svg")
        start = report.start_year
        proj = _projection_rows(params, grid, cfg.ema)
        write_table([(start + r[0],) + r for r in proj], out / f"{name}_project.csv",
                    ("year",) + PROJECT_COLUMNS)
        emit_plot({name: [(start + r[0], r[3]) for r in proj]}, out / f"{name}_project.svg",
                  title=f"{name}: projected CTI", xlabel="year", ylabel="CTI")
        rates = rate_profile(params, cfg.ema, grid)
        write_table([(start + s.t_years,) + s.row() for s in rates], out / f"{name}_rate.csv",
                    ("year",) + RateSample.COLUMNS)
        emit_plot({name: [(start + s.t_years, s.dcti_dt) for s in rates]}, out / f"{name}_rate.svg",
                  title=f"{name}: CTI growth rate", xlabel="year", ylabel="dCTI/dt (1/year)")
        last_year, last_p = series.observations[-1]
        cti = cti_from_share(last_p, cfg.ema)
        summary.append((name, report.selected, params.alpha, params.beta, params.gamma,
                        params.delta_t0_years, report.linear.r_squared,
                        report.quadratic.r_squared if report.quadratic else float("nan"),
                        last_year, cti, classify(cti).name))
    write_table(summary, out / "summary.csv",
                ("country", "selected", "alpha_per_year", "beta", "gamma", "delta_t0_years",
                 "r2_linear", "r2_quadratic", "last_year", "last_cti", "region"))
    print(f"{len(summary)} countries calibrated, {len(failed)} failed; output in {out}")
    return 1 if failed else 0


COMMANDS = {
    "fit": cmd_fit,
    "classify": cmd_classify,
    "project": cmd_project,
    "rate": cmd_rate,
    "policy": cmd_policy,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cti: error: {exc}", file=sys.stderr)
        return 2
    except (CTIError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


run = main


if __name__ == "__main__":
    sys.exit(main())
