"""Acceptance criteria; conftest prints one PASS/FAIL line per criterion."""

import itertools
import math
import time

import numpy as np
import pytest
from scipy import integrate, stats

from futopt.calibration import calibrate, ols_ar1
from futopt.cli import main
from futopt.domain import ModelKind, OptionSpec, OuParams, PriceSeries, RiskNeutralParams
from futopt.errors import NegativeStrike, NegativeUnderlying
from futopt.io import write_series_csv
from futopt.montecarlo import SimulationPlan, mc_price, simulate_garch_path, simulate_ou_path
from futopt.normal import norm_cdf
from futopt.pricing import (
    bachelier_call,
    black76_call,
    black76_put,
    gaussian_call,
    ou_terminal_moments,
    vasicek_call,
)
from futopt.selector import SeriesDiagnosis, Sign, recommend

ac = pytest.mark.acceptance


# ---------- 1: closed form vs Monte Carlo ----------

LEVELS = dict(a=[0.5, 2.0], b=[-5.0, 0.0, 5.0], sigma=[0.3, 1.0], f0=[-10.0, 2.0, 50.0],
              strike=["-12", "0", "F0"], rate=[0.0, 0.05])
MIN_ITM_PROBABILITY = 1e-3


def itm_probability(a, b, sigma, f0, strike, horizon=1.0):
    mean, var = ou_terminal_moments(OuParams(a, b, sigma), f0, horizon)
    return 1.0 - norm_cdf((strike - mean) / math.sqrt(var))


def reconciliation_cells(n=25):
    """Evenly strided cells of the full factor grid.

    Cells where fewer than ~100 of 1e5 paths are expected to finish in the
    money are skipped: there the sample payoff is identically zero, its
    standard error is zero and a 3-se band tests nothing. The filter uses only
    the closed-form terminal law.
    """
    cells = []
    for a, b, sigma, f0, k, r in itertools.product(*LEVELS.values()):
        strike = f0 if k == "F0" else float(k)
        if itm_probability(a, b, sigma, f0, strike) >= MIN_ITM_PROBABILITY:
            cells.append((a, b, sigma, f0, strike, r))
    return [cells[i * len(cells) // n] for i in range(n)]


def test_reconciliation_cells_span_every_level():
    cells = reconciliation_cells()
    assert len(set(cells)) == 25
    for j, name in enumerate(["a", "b", "sigma", "f0"]):
        assert {c[j] for c in cells} == set(LEVELS[name])
    assert {c[5] for c in cells} == set(LEVELS["rate"])
    assert any(c[4] == c[3] for c in cells)
    assert {-12.0, 0.0} <= {c[4] for c in cells}


@ac(1)
def test_closed_form_vs_monte_carlo(detail):
    start = time.perf_counter()
    hits, misses = 0, []
    for i, (a, b, sigma, f0, strike, r) in enumerate(reconciliation_cells()):
        rn = RiskNeutralParams(a, b, 0.0, ModelKind.VASICEK)
        spec = OptionSpec(strike=strike, expiry=1.0, forward=f0, rate=r)
        paths = simulate_ou_path(rn.dynamics(sigma), f0, SimulationPlan(100_000, 1, 1.0, seed=i))
        est = mc_price(paths, spec)
        exact = vasicek_call(spec, rn, sigma).value
        if abs(est.price - exact) <= 3 * est.std_error:
            hits += 1
        else:
            misses.append((a, b, sigma, f0, strike, r))
    elapsed = time.perf_counter() - start
    detail(f"{hits}/25 cells within 3 se, {elapsed:.1f}s")
    assert hits >= 23, misses
    assert elapsed < 120


# ---------- 2: Gaussian call vs quadrature ----------


def quadrature_call(mean, std, strike):
    pdf = stats.norm(mean, std).pdf
    lo, hi = max(strike, mean - 12 * std), mean + 12 * std
    if lo >= hi:
        return 0.0
    val, _ = integrate.quad(lambda x: (x - strike) * pdf(x), lo, hi,
                            points=[mean] if lo < mean else None,
                            epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


@ac(2)
def test_gaussian_call_matches_quadrature(detail):
    rng = np.random.default_rng(2024)
    means = rng.uniform(-40.0, 40.0, 100)
    strikes = means + rng.uniform(-15.0, 15.0, 100)
    stds = rng.uniform(0.05, 10.0, 100)
    worst = 0.0
    for m, k, s in zip(means, strikes, stds):
        got = gaussian_call(float(m), float(s), float(k), 0.03, 1.0).value
        want = math.exp(-0.03) * quadrature_call(m, s, k)
        worst = max(worst, abs(got - want))
    assert (means < 0).sum() > 20 and (strikes < 0).sum() > 20
    detail(f"max abs error {worst:.1e}")
    assert worst <= 1e-8


# ---------- 3: Black-76 ----------


@ac(3)
@pytest.mark.parametrize("F, K, r, T", [(100.0, 90.0, 0.05, 1.0), (100.0, 110.0, 0.0, 0.5),
                                        (3.2, 3.2, 0.02, 2.0), (0.5, 40.0, 0.1, 0.25)])
def test_black76_zero_vol_limit(F, K, r, T):
    spec = OptionSpec(strike=K, expiry=T, forward=F, rate=r)
    disc = math.exp(-r * T)
    assert abs(black76_call(spec, 1e-12).value - disc * max(F - K, 0.0)) <= 1e-10
    assert abs(black76_put(spec, 1e-12).value - disc * max(K - F, 0.0)) <= 1e-10


@ac(3)
def test_black76_put_call_parity():
    rng = np.random.default_rng(3)
    for _ in range(200):
        F, K = rng.uniform(1.0, 200.0, 2)
        r, T, sigma = rng.uniform(0.0, 0.1), rng.uniform(0.05, 3.0), rng.uniform(0.05, 1.0)
        spec = OptionSpec(strike=K, expiry=T, forward=F, rate=r)
        c, p = black76_call(spec, sigma).value, black76_put(spec, sigma).value
        if p == 0.0 or c == 0.0:
            continue  # parity put clamped at zero
        assert abs(c - p - math.exp(-r * T) * (F - K)) <= 1e-12


@ac(3)
@pytest.mark.parametrize("F, K, err", [(-10.0, 5.0, NegativeUnderlying), (0.0, 5.0, NegativeUnderlying),
                                       (10.0, 0.0, NegativeStrike), (10.0, -3.0, NegativeStrike)])
def test_black76_domain_errors(F, K, err):
    spec = OptionSpec(strike=K, expiry=1.0, forward=F)
    with pytest.raises(err):
        black76_call(spec, 0.3)
    with pytest.raises(err):
        black76_put(spec, 0.3)


# ---------- 4: OLS ----------


def lstsq_fit(values):
    x, y = values[:-1], values[1:]
    design = np.column_stack([x, np.ones_like(x)])
    (tau, mu), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ np.array([tau, mu])
    return tau, mu, math.sqrt(resid @ resid / (x.size - 2))


@ac(4)
def test_ols_matches_least_squares(detail):
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(10, 2000))
        values = np.cumsum(rng.normal(0, rng.uniform(0.1, 5), n)) + rng.uniform(-100, 100)
        st = ols_ar1(PriceSeries(values, 1 / 252))
        for got, want in zip((st.tau, st.mu, st.sd_e), lstsq_fit(values)):
            worst = max(worst, abs(got - want) / max(abs(want), 1e-300))
    detail(f"max relative error {worst:.1e}")
    assert worst <= 1e-10


@ac(4)
def test_ols_hand_example():
    st = ols_ar1(PriceSeries([0.0, 1.0, 0.0, 1.0], 1.0))
    assert (st.tau, st.mu, st.sd_e) == (-1.0, 1.0, 0.0)


# ---------- 5: calibration round trip ----------


@ac(5)
def test_calibration_round_trip(detail):
    truth = OuParams(1.68528518, 2.64820985, 0.5)
    step = 1 / 252
    fits = []
    for seed in range(20):
        res = simulate_ou_path(truth, truth.b, SimulationPlan(1, 5000, step, seed=seed), keep_paths=True)
        _, p = calibrate(PriceSeries(res.paths[:, 0], step))
        fits.append((p.a, p.b, p.sigma))
    a, b, sigma = np.mean(fits, axis=0)
    ea, eb, es = a / truth.a - 1, b / truth.b - 1, sigma / truth.sigma - 1
    detail(f"a {ea:+.1%}, b {eb:+.1%}, sigma {es:+.1%}")
    assert abs(ea) <= 0.15
    assert abs(eb) <= 0.15
    assert abs(es) <= 0.10


# ---------- 6: model table ----------


@ac(6)
@pytest.mark.parametrize("sign", list(Sign))
@pytest.mark.parametrize("level", [None, 0.0, 2.5, -4.0])
def test_model_table(sign, level):
    expected = {
        (Sign.ALL_POSITIVE, "none"): ModelKind.GBM_BLACK76,
        (Sign.ALL_POSITIVE, "level"): ModelKind.CONTINUOUS_GARCH,
        (Sign.MIXED, "zero"): ModelKind.OU,
        (Sign.MIXED, "level"): ModelKind.VASICEK,
        (Sign.MIXED, "none"): ModelKind.BACHELIER,
    }
    kind = "none" if level is None else ("zero" if level == 0.0 and sign is Sign.MIXED else "level")
    assert recommend(SeriesDiagnosis(sign, level, 0.9, -5.0)) is expected[sign, kind]


@ac(6)
def test_model_table_covers_every_model():
    seen = {recommend(SeriesDiagnosis(s, lv, 0.9, -5.0))
            for s in Sign for lv in (None, 0.0, 1.0)}
    assert seen == set(ModelKind)


# ---------- 7: negative prices ----------


@ac(7)
def test_negative_forward_sweep(detail):
    strikes = np.linspace(-20.0, 0.0, 41)
    rn = RiskNeutralParams(1.68528518, -6.0, 0.0, ModelKind.VASICEK)
    vas, bach = [], []
    for k in strikes:
        spec = OptionSpec(strike=float(k), expiry=1.0, forward=-10.0, rate=0.03)
        vas.append(vasicek_call(spec, rn, 4.0).value)
        bach.append(bachelier_call(spec, 5.0).value)
        with pytest.raises(NegativeUnderlying):
            black76_call(spec, 0.4)
    for prices in (np.array(vas), np.array(bach)):
        assert np.all(np.isfinite(prices))
        assert np.all(prices >= 0.0)
        assert np.all(np.diff(prices) <= 0.0)
    detail(f"{len(strikes)} strikes")


@ac(7)
def test_negative_forward_report(tmp_path, capsys):
    truth = OuParams(2.0, -1.0, 6.0)
    res = simulate_ou_path(truth, -10.0, SimulationPlan(1, 499, 1 / 252, seed=7), keep_paths=True)
    csv_path = write_series_csv(PriceSeries(res.paths[:, 0], 1 / 252), tmp_path / "neg.csv")
    code = main(["compare", str(csv_path), "--strikes=-20:0:11", "--forward=-10",
                 "--paths", "20000", "--no-plot", "--out", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "report.csv").read_text().splitlines()
    header = rows[0].split(",")
    body = [dict(zip(header, r.split(","))) for r in rows[1:]]
    assert len(body) == 11
    for row in body:
        assert row["black76"] == "domain-error"
        for col in ("vasicek", "bachelier", "vasicek_mc"):
            assert math.isfinite(float(row[col])) and float(row[col]) >= 0.0


# ---------- 8: determinism across workers ----------


@ac(8)
def test_report_identical_across_workers(tmp_path, detail):
    truth = OuParams(3.0, 40.0, 6.0)
    res = simulate_ou_path(truth, 40.0, SimulationPlan(1, 399, 1 / 252, seed=8), keep_paths=True)
    csv_path = write_series_csv(PriceSeries(res.paths[:, 0], 1 / 252), tmp_path / "pos.csv")
    outputs = []
    for workers in (1, 4, 8):
        out = tmp_path / f"w{workers}"
        code = main(["compare", str(csv_path), "--strikes", "20:60:9", "--seed", "11",
                     "--workers", str(workers), "--no-plot", "--out", str(out)])
        assert code == 0
        outputs.append((out / "report.csv").read_bytes())
    assert b"domain-error" not in outputs[0]  # GARCH and Black-76 columns populated
    assert outputs[0] == outputs[1] == outputs[2]
    detail(f"{len(outputs[0])} bytes, 1/4/8 workers")


# ---------- 9: Jensen ordering ----------


@ac(9)
def test_paper_average_never_exceeds_standard(detail):
    rng = np.random.default_rng(9)
    for i in range(50):
        f0 = float(rng.uniform(-20, 60))
        spec = OptionSpec(strike=float(f0 + rng.uniform(-15, 15)), expiry=float(rng.uniform(0.1, 2)),
                          forward=f0, rate=float(rng.uniform(0, 0.08)))
        a, b = float(rng.uniform(0.2, 3)), float(rng.uniform(-10, 60))
        n_steps = int(rng.integers(1, 30))
        plan = SimulationPlan.over(spec.horizon, n_steps, n_paths=int(rng.integers(2, 5000)), seed=i)
        if f0 > 0 and i % 2:
            paths = simulate_garch_path(OuParams(a, abs(b), float(rng.uniform(0.05, 0.8))), f0, plan)
        else:
            paths = simulate_ou_path(OuParams(a, b, float(rng.uniform(0.1, 10))), f0, plan)
        assert mc_price(paths, spec, "paper-average").price <= mc_price(paths, spec).price
    detail("50 configurations")


# ---------- 10: GARCH one-step moments ----------


@ac(10)
@pytest.mark.parametrize("a, b, sigma, f0, step", [(1.0, 3.0, 0.5, 2.0, 1 / 252),
                                                   (1.68528518, 2.64820985, 0.3, 4.0, 1 / 12),
                                                   (0.4, 80.0, 0.9, 60.0, 0.5)])
def test_garch_one_step_moments(a, b, sigma, f0, step):
    n = 100_000
    x = simulate_garch_path(OuParams(a, b, sigma), f0, SimulationPlan(n, 1, step, seed=10)).terminal
    mean = f0 * math.exp(-a * step) + b * (1 - math.exp(-a * step))
    sd = sigma * f0 * math.sqrt((1 - math.exp(-2 * a * step)) / (2 * a))
    assert abs(x.mean() - mean) <= 4 * sd / math.sqrt(n)
    assert abs(x.std(ddof=1) - sd) <= 4 * sd / math.sqrt(2 * (n - 1))
