"""Strike-sweep comparison of every pricer on one calibrated series."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from futopt import calibration, pricing
from futopt.domain import (
    ModelKind,
    OptionSpec,
    OuParams,
    PriceSeries,
    RegressionStats,
    RiskNeutralParams,
)
from futopt.errors import FutoptError, InvalidParameter, NegativeUnderlying
from futopt.io import dump_json, line_plot, write_rows_csv
from futopt.montecarlo import (
    PRICING_PATHS,
    Scheme,
    SimulationPlan,
    mc_price,
    simulate_garch_path,
    simulate_ou_path,
)
from futopt.selector import (
    DEFAULT_CRITICAL,
    DEFAULT_ZERO_TOL,
    SeriesDiagnosis,
    Sign,
    diagnose,
    recommend,
)

DOMAIN_ERROR = "domain-error"


class LambdaWarning(UserWarning):
    """The market price of risk was estimated where the estimator is unreliable."""

COLUMNS = [
    "strike",
    "black76",
    "vasicek",
    "vasicek_paper",
    "bachelier",
    "vasicek_mc",
    "vasicek_mc_se",
    "garch_mc",
    "garch_mc_se",
]


@dataclass(frozen=True)
class RunConfig:
    rate: float = 0.0
    step: Optional[float] = None
    lam: Optional[float] = None
    lambda_sigma: Optional[float] = None
    strikes: tuple[float, float, int] = (0.0, 0.0, 1)
    n_paths: int = PRICING_PATHS
    seed: int = 0
    model: Optional[ModelKind] = None
    expiry: float = 1.0
    forward: Optional[float] = None
    paper_verbatim: bool = False
    paper_average: bool = False
    verbatim_growth: bool = False
    zero_tol: float = DEFAULT_ZERO_TOL
    critical: float = DEFAULT_CRITICAL
    workers: int = 1

    def __post_init__(self):
        lo, hi, count = self.strikes
        if int(count) < 1:
            raise InvalidParameter("strike grid needs at least one point")
        if lo > hi:
            raise InvalidParameter(f"strike grid min {lo} exceeds max {hi}")
        if not self.expiry > 0:
            raise InvalidParameter("expiry must be > 0")
        if self.n_paths < 1:
            raise InvalidParameter("need at least one path")
        if self.workers < 1:
            raise InvalidParameter("need at least one worker")

    @property
    def mc_mode(self) -> str:
        return "paper-average" if self.paper_average else "standard"

    def strike_grid(self) -> np.ndarray:
        lo, hi, count = self.strikes
        return np.linspace(lo, hi, int(count))


def parse_strikes(text: str) -> tuple[float, float, int]:
    """``"min:max:count"`` -> (min, max, count)."""
    try:
        lo, hi, count = text.split(":")
        return float(lo), float(hi), int(count)
    except ValueError:
        raise InvalidParameter(f"strikes must look like min:max:count, got {text!r}") from None


@dataclass
class Calibration:
    """Everything derived from the series before any option is priced.

    OU-based fields are None when the series does not mean-revert; the error
    is kept and re-raised by ``require_ou`` for callers that need them.
    """

    series: PriceSeries
    stats: RegressionStats
    diagnosis: SeriesDiagnosis
    recommended: ModelKind
    ou: Optional[OuParams] = None
    vasicek: Optional[RiskNeutralParams] = None
    ou_error: Optional[FutoptError] = None
    garch_sigma: Optional[float] = None
    garch: Optional[RiskNeutralParams] = None
    garch_error: Optional[str] = None
    black76_sigma: Optional[float] = None
    bachelier_sigma: float = math.nan
    lambda_estimated: bool = True

    def require_ou(self) -> tuple[OuParams, RiskNeutralParams]:
        if self.ou is None:
            raise self.ou_error
        return self.ou, self.vasicek

    def summary(self) -> dict:
        d = self.diagnosis
        st = self.stats
        out = {
            "label": self.series.label,
            "n_obs": len(self.series),
            "step": self.series.step,
            "last_price": self.series.last,
            "regression": {
                "n": st.n, "f_x": st.f_x, "f_y": st.f_y, "f_xx": st.f_xx,
                "f_yy": st.f_yy, "f_xy": st.f_xy, "tau": st.tau, "mu": st.mu,
                "sd_e": st.sd_e,
            },
            "diagnosis": {
                "sign": d.sign.value,
                "mean_reversion": "none" if d.level is None else "level",
                "level": d.level,
                "tau": d.tau,
                "t_stat": d.t_stat,
            },
            "recommended_model": self.recommended.value,
            "params": None,
            "vasicek": None,
            "garch": None,
            "black76_sigma": self.black76_sigma,
            "bachelier_sigma": self.bachelier_sigma,
        }
        if self.ou is not None:
            out["params"] = {"a": self.ou.a, "b": self.ou.b, "sigma": self.ou.sigma}
            out["vasicek"] = {
                "lambda": self.vasicek.lam,
                "lambda_source": "estimated" if self.lambda_estimated else "override",
                "a_star": self.vasicek.a_star,
                "b_star": self.vasicek.b_star,
            }
        else:
            out["params_error"] = f"{type(self.ou_error).__name__}: {self.ou_error}"
        if self.garch is not None:
            out["garch"] = {
                "sigma": self.garch_sigma,
                "lambda": self.garch.lam,
                "a_star": self.garch.a_star,
                "b_star": self.garch.b_star,
            }
        elif self.garch_error:
            out["garch_error"] = self.garch_error
        return out


def calibrate_all(series: PriceSeries, config: RunConfig) -> Calibration:
    stats = calibration.ols_ar1(series)
    diag = diagnose(series, config.zero_tol, config.critical)
    cal = Calibration(series, stats, diag, config.model or recommend(diag),
                      lambda_estimated=config.lam is None)
    if config.lam is None and diag.sign is Sign.MIXED:
        # simple returns F_i / F_{i-1} - 1 explode as prices cross zero
        warnings.warn("lambda estimated from returns of a series with non-positive prices "
                      "is unreliable; pass an explicit lambda", LambdaWarning, stacklevel=2)

    try:
        ou = calibration.params_from_regression(stats, series.step)
        lam = config.lam
        if lam is None:
            lam = calibration.market_price_of_risk(
                series, config.rate, config.lambda_sigma or ou.sigma)
        tag = ModelKind.OU if diag.level == 0.0 else ModelKind.VASICEK
        cal.ou, cal.vasicek = ou, calibration.risk_neutralize(ou, lam, tag)
    except FutoptError as exc:
        cal.ou_error = exc

    if cal.ou is not None:
        try:
            g_sigma = calibration.garch_sigma(series, stats)
            g_lam = config.lam
            if g_lam is None:
                g_lam = calibration.market_price_of_risk(
                    series, config.rate, config.lambda_sigma or g_sigma)
            cal.garch_sigma = g_sigma
            cal.garch = calibration.risk_neutralize(
                OuParams(cal.ou.a, cal.ou.b, g_sigma), g_lam, ModelKind.CONTINUOUS_GARCH)
        except FutoptError as exc:
            cal.garch_sigma = None
            cal.garch_error = f"{type(exc).__name__}: {exc}"
    else:
        cal.garch_error = f"{type(cal.ou_error).__name__}: {cal.ou_error}"

    try:
        cal.black76_sigma = calibration.lognormal_vol(series)
    except FutoptError:
        cal.black76_sigma = None
    cal.bachelier_sigma = calibration.normal_vol(series)
    return cal


@dataclass
class CompareReport:
    calibration: Calibration
    forward: float
    rows: list = field(default_factory=list)

    def summary(self) -> dict:
        out = self.calibration.summary()
        out["forward"] = self.forward
        out["vs_black76"] = self.black76_gap()
        return out

    def black76_gap(self) -> dict:
        """Largest gap between Black-76 and the Vasicek closed form."""
        abs_gap, rel_gap = None, None
        for row in self.rows:
            b, v = row["black76"], row["vasicek"]
            if isinstance(b, str):
                continue
            d = abs(v - b)
            abs_gap = d if abs_gap is None else max(abs_gap, d)
            # relative gap only where the option has material value
            if b >= 1e-3 * abs(self.forward):
                r = d / b
                rel_gap = r if rel_gap is None else max(rel_gap, r)
        return {"max_abs_diff": abs_gap, "max_rel_diff": rel_gap}

    def write(self, out_dir, plot: bool = True) -> dict:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        files = {"report": write_rows_csv(self.rows, COLUMNS, out_dir / "report.csv")}
        dump_json(self.summary(), out_dir / "summary.json")
        files["summary"] = out_dir / "summary.json"
        if plot:
            strikes = [r["strike"] for r in self.rows]

            def col(name):
                return [None if isinstance(r[name], str) else r[name] for r in self.rows]

            files["plot"] = line_plot(
                strikes,
                {
                    "Black-76": col("black76"),
                    "Vasicek": col("vasicek"),
                    "Vasicek (verbatim)": col("vasicek_paper"),
                    "Bachelier": col("bachelier"),
                    "Vasicek MC": col("vasicek_mc"),
                    "GARCH MC": col("garch_mc"),
                },
                out_dir / "report.svg",
                xlabel="strike",
                ylabel="call value",
                title=f"{self.calibration.series.label}: F = {self.forward:.6g}",
            )
        return files


def garch_steps(expiry: float, step: float) -> int:
    return max(1, int(round(expiry / step)))


def run_compare(series: PriceSeries, config: RunConfig) -> CompareReport:
    """Calibrate, then price a call at every strike of the grid with every model."""
    cal = calibrate_all(series, config)
    ou, vasicek = cal.require_ou()
    forward = series.last if config.forward is None else float(config.forward)
    expiry = config.expiry
    mode = config.mc_mode

    ou_paths = simulate_ou_path(
        vasicek.dynamics(ou.sigma), forward,
        SimulationPlan.over(expiry, 1, n_paths=config.n_paths, seed=config.seed,
                            scheme=Scheme.OU_EXACT),
        workers=config.workers,
    )
    garch_paths = None
    if cal.garch is not None:
        garch_paths = simulate_garch_path(
            cal.garch.dynamics(cal.garch_sigma), forward,
            SimulationPlan.over(expiry, garch_steps(expiry, series.step),
                                n_paths=config.n_paths, seed=(config.seed + 1) % 2**64,
                                scheme=Scheme.GARCH_RECURSION),
            verbatim_growth=config.verbatim_growth,
            workers=config.workers,
        )

    report = CompareReport(cal, forward)
    for strike in config.strike_grid():
        spec = OptionSpec(strike=float(strike), expiry=expiry, forward=forward, rate=config.rate)
        row = {"strike": float(strike)}
        try:
            if cal.black76_sigma is None:
                raise NegativeUnderlying("series has non-positive prices")
            row["black76"] = pricing.black76_call(spec, cal.black76_sigma).value
        except FutoptError:
            row["black76"] = DOMAIN_ERROR
        row["vasicek"] = pricing.vasicek_call(spec, vasicek, ou.sigma).value
        row["vasicek_paper"] = pricing.vasicek_call_paper(spec, vasicek, ou.sigma).value
        row["bachelier"] = pricing.bachelier_call(spec, cal.bachelier_sigma).value
        est = mc_price(ou_paths, spec, mode)
        row["vasicek_mc"], row["vasicek_mc_se"] = est.price, est.std_error
        if garch_paths is None:
            row["garch_mc"], row["garch_mc_se"] = DOMAIN_ERROR, None
        else:
            est = mc_price(garch_paths, spec, mode)
            row["garch_mc"], row["garch_mc_se"] = est.price, est.std_error
        report.rows.append(row)
    return report
