"""Command-line entry point: ``futopt {calibrate,recommend,simulate,price,compare}``."""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from futopt import calibration, pricing
from futopt.domain import ModelKind, OptionSpec
from futopt.errors import FutoptError, InvalidParameter
from futopt.io import dump_json, ingest_csv, line_plot, write_paths_csv
from futopt.montecarlo import (
    PRICING_PATHS,
    REPLICATION_PATHS,
    Scheme,
    SimulationPlan,
    mc_price,
    simulate,
)
from futopt.report import RunConfig, calibrate_all, garch_steps, parse_strikes, run_compare


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("csv", help="settlement prices with a date,settle header")
    p.add_argument("--date-col", default="date")
    p.add_argument("--price-col", default="settle")
    p.add_argument("--step", type=float, help="observation spacing in years (default: inferred)")
    p.add_argument("--rate", type=float, default=0.0, help="continuously compounded rate")
    p.add_argument("--lambda", dest="lam", type=float, help="market price of risk override")
    p.add_argument("--lambda-sigma", type=float,
                   help="volatility used to estimate lambda (default: calibrated)")
    p.add_argument("--zero-tol", type=float, default=0.1)
    p.add_argument("--critical", type=float, default=-2.86,
                   help="unit-root t-statistic threshold for mean reversion")
    p.add_argument("--model", type=ModelKind.parse, help="override the recommended model")
    p.add_argument("--out", type=Path, help="directory for output files")


def _add_mc(p: argparse.ArgumentParser, default_paths: int) -> None:
    p.add_argument("--paths", type=int, default=default_paths)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--expiry", type=float, default=1.0, help="years to expiry")
    p.add_argument("--paper-average", action="store_true",
                   help="apply the payoff to the average terminal price")
    p.add_argument("--verbatim-growth", action="store_true",
                   help="GARCH recursion with the positive growth exponent")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="futopt",
        description="Options on futures with negative or mean-reverting prices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="AR(1) calibration of (a, b, sigma)")
    _add_common(p)

    p = sub.add_parser("recommend", help="diagnose the series and pick a model")
    _add_common(p)

    p = sub.add_parser("simulate", help="write simulated risk-neutral paths")
    _add_common(p)
    _add_mc(p, REPLICATION_PATHS)
    p.add_argument("--n-steps", type=int, help="steps per path (default: expiry / step)")
    p.add_argument("--no-plot", action="store_true")

    p = sub.add_parser("price", help="value one option")
    _add_common(p)
    _add_mc(p, PRICING_PATHS)
    p.add_argument("--strike", type=float, required=True)
    p.add_argument("--kind", choices=("call", "put"), default="call")
    p.add_argument("--forward", type=float, help="current futures price (default: last settle)")
    p.add_argument("--paper-verbatim", action="store_true",
                   help="OU/Vasicek: evaluate the xi/zeta expression as written")

    p = sub.add_parser("compare", help="strike sweep over every model")
    _add_common(p)
    _add_mc(p, PRICING_PATHS)
    p.add_argument("--strikes", type=parse_strikes, required=True, help="min:max:count")
    p.add_argument("--forward", type=float, help="current futures price (default: last settle)")
    p.add_argument("--no-plot", action="store_true")
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        rate=args.rate,
        step=args.step,
        lam=args.lam,
        lambda_sigma=args.lambda_sigma,
        strikes=getattr(args, "strikes", (0.0, 0.0, 1)),
        n_paths=getattr(args, "paths", PRICING_PATHS),
        seed=getattr(args, "seed", 0),
        model=args.model,
        expiry=getattr(args, "expiry", 1.0),
        forward=getattr(args, "forward", None),
        paper_verbatim=getattr(args, "paper_verbatim", False),
        paper_average=getattr(args, "paper_average", False),
        verbatim_growth=getattr(args, "verbatim_growth", False),
        zero_tol=args.zero_tol,
        critical=args.critical,
        workers=getattr(args, "workers", 1),
    )


def _emit(doc: dict, out_dir, name: str) -> None:
    path = None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / name
    print(dump_json(doc, path))


def cmd_calibrate(series, config, args) -> None:
    cal = calibrate_all(series, config)
    cal.require_ou()
    _emit(cal.summary(), args.out, "params.json")


def cmd_recommend(series, config, args) -> None:
    summary = calibrate_all(series, config).summary()
    doc = dict(summary["diagnosis"])
    doc["model"] = summary["recommended_model"]
    _emit(doc, args.out, "recommendation.json")


def _dynamics(cal, model: ModelKind):
    """(scheme, risk-neutral OuParams) used to simulate ``model``."""
    if model is ModelKind.CONTINUOUS_GARCH:
        if cal.garch is None:
            raise InvalidParameter(f"GARCH calibration failed: {cal.garch_error}")
        return Scheme.GARCH_RECURSION, cal.garch.dynamics(cal.garch_sigma)
    if model in (ModelKind.OU, ModelKind.VASICEK):
        ou, vasicek = cal.require_ou()
        return Scheme.OU_EXACT, vasicek.dynamics(ou.sigma)
    raise InvalidParameter(f"{model.value} has no mean-reverting simulation; use ou, vasicek or garch")


def cmd_simulate(series, config, args) -> None:
    cal = calibrate_all(series, config)
    scheme, params = _dynamics(cal, cal.recommended)
    n_steps = args.n_steps or garch_steps(config.expiry, series.step)
    plan = SimulationPlan.over(config.expiry, n_steps, n_paths=config.n_paths,
                               seed=config.seed, scheme=scheme)
    result = simulate(params, series.last, plan, keep_paths=True,
                      verbatim_growth=config.verbatim_growth, workers=config.workers)
    times = np.arange(n_steps + 1) * plan.step
    out_dir = args.out or Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    write_paths_csv(result.paths, times, out_dir / "paths.csv")
    if not args.no_plot:
        line_plot(times, {f"path {j}": result.paths[:, j] for j in range(result.paths.shape[1])},
                  out_dir / "paths.svg", xlabel="years", ylabel="futures price",
                  title=f"{cal.recommended.value} simulated futures prices")
    _emit({"model": cal.recommended.value, "scheme": scheme.value, "n_paths": plan.n_paths,
           "n_steps": n_steps, "step": plan.step, "paths_csv": str(out_dir / "paths.csv")},
          None, "")


def _vasicek_args(cal):
    ou, vasicek = cal.require_ou()
    return vasicek, ou.sigma


def cmd_price(series, config, args) -> None:
    cal = calibrate_all(series, config)
    model = cal.recommended
    forward = series.last if config.forward is None else config.forward
    spec = OptionSpec(strike=args.strike, expiry=config.expiry, forward=forward,
                      rate=config.rate, kind=args.kind)
    if model is ModelKind.GBM_BLACK76:
        quote = pricing.black76(spec, cal.black76_sigma or calibration.lognormal_vol(series))
    elif model is ModelKind.BACHELIER:
        quote = pricing.bachelier(spec, cal.bachelier_sigma)
    elif model in (ModelKind.OU, ModelKind.VASICEK):
        if config.paper_verbatim:
            if spec.kind != "call":
                raise InvalidParameter("the verbatim OU/Vasicek expression prices calls only")
            quote = pricing.vasicek_call_paper(spec, *_vasicek_args(cal))
        else:
            quote = pricing.vasicek(spec, *_vasicek_args(cal))
    else:
        scheme, params = _dynamics(cal, model)
        plan = SimulationPlan.over(config.expiry, garch_steps(config.expiry, series.step),
                                   n_paths=config.n_paths, seed=config.seed, scheme=scheme)
        paths = simulate(params, forward, plan, verbatim_growth=config.verbatim_growth,
                         workers=config.workers)
        quote = mc_price(paths, spec, config.mc_mode).quote(model.value)
    _emit({"model": quote.model, "method": quote.method.value, "value": quote.value,
           "std_error": quote.std_error, "strike": spec.strike, "forward": spec.forward,
           "expiry": spec.expiry, "kind": spec.kind}, args.out, "quote.json")


def cmd_compare(series, config, args) -> None:
    report = run_compare(series, config)
    out_dir = args.out or Path(".")
    files = report.write(out_dir, plot=not args.no_plot)
    summary = report.summary()
    print(dump_json({
        "recommended_model": summary["recommended_model"],
        "vs_black76": summary["vs_black76"],
        "files": {k: str(v) for k, v in files.items()},
    }))


COMMANDS = {
    "calibrate": cmd_calibrate,
    "recommend": cmd_recommend,
    "simulate": cmd_simulate,
    "price": cmd_price,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config(args)
        series = ingest_csv(args.csv, args.date_col, args.price_col, step=args.step)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            COMMANDS[args.command](series, config, args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except FutoptError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
