"""Least-squares AR(1) calibration of mean-reverting futures prices.

The exact discretisation of dF = a(b - F)dt + sigma dW over a step delta is
an AR(1) process

    F_i = tau * F_{i-1} + mu + e_i,   e_i ~ N(0, sd_e^2)

with tau = exp(-a delta), mu = b (1 - tau) and
sd_e^2 = sigma^2 (1 - tau^2) / (2a). Fitting the regression by ordinary least
squares and inverting those relations gives (a, b, sigma).
"""

from __future__ import annotations

import math

import numpy as np

from futopt.domain import (
    ModelKind,
    OuParams,
    PriceSeries,
    RegressionStats,
    RiskNeutralParams,
)
from futopt.errors import (
    DegenerateSeries,
    DegenerateVolatility,
    NeedsAtLeastFourPoints,
    NegativeUnderlying,
    NoMeanReversion,
    OscillatoryOrInvalid,
    SignFlip,
    UnsupportedModel,
    ZeroPrice,
    ZeroVolatility,
)


def ols_ar1(series: PriceSeries) -> RegressionStats:
    """Regress each price on its predecessor; the five raw sums are returned too."""
    f = series.values
    x, y = f[:-1], f[1:]
    n = x.size
    if n <= 2:
        raise NeedsAtLeastFourPoints(f"need n >= 3 transition pairs, got {n}")

    f_x = math.fsum(x)
    f_y = math.fsum(y)
    f_xx = math.fsum(x * x)
    f_yy = math.fsum(y * y)
    f_xy = math.fsum(x * y)

    # The raw-sum denominators cancel catastrophically for series far from
    # zero, so the same quantities are evaluated from centred data.
    xm, ym = f_x / n, f_y / n
    dx, dy = x - xm, y - ym
    sxx = math.fsum(dx * dx)
    sxy = math.fsum(dx * dy)
    syy = math.fsum(dy * dy)
    if sxx <= 0.0 or sxx <= 1e-28 * max(f_xx, 1e-300):
        raise DegenerateSeries("regressor has zero variance (constant series)")

    tau = sxy / sxx
    mu = (f_y - tau * f_x) / n
    ssr = max(syy - tau * sxy, 0.0)
    # n * ssr == n F_yy - F_y^2 - tau (n F_xy - F_x F_y); denominator n (n - 2)
    sd_e = math.sqrt(n * ssr / (n * (n - 2)))
    return RegressionStats(n, f_x, f_y, f_xx, f_yy, f_xy, tau, mu, sd_e)


def params_from_regression(stats: RegressionStats, step: float) -> OuParams:
    tau = stats.tau
    if tau >= 1.0:
        raise NoMeanReversion(f"AR(1) slope {tau:.6g} >= 1 gives a non-positive reversion rate")
    if tau <= 0.0:
        raise OscillatoryOrInvalid(f"AR(1) slope {tau:.6g} <= 0 has no real log")
    log_tau = math.log(tau)
    a = -log_tau / step
    b = stats.mu / (1.0 - tau)
    sigma = stats.sd_e * math.sqrt(-2.0 * log_tau / (step * (1.0 - tau * tau)))
    if sigma <= 0.0:
        raise DegenerateVolatility("residual standard deviation is zero")
    return OuParams(a, b, sigma)


def calibrate(series: PriceSeries) -> tuple[RegressionStats, OuParams]:
    stats = ols_ar1(series)
    return stats, params_from_regression(stats, series.step)


def garch_sigma(series: PriceSeries, stats: RegressionStats) -> float:
    """Proportional volatility for dF = a(b - F)dt + sigma F dW.

    Uses the same AR(1) fit; each residual is divided by the price it was
    conditioned on, since its standard deviation is proportional to that price.
    """
    f = series.values
    x, y = f[:-1], f[1:]
    if np.any(f <= 0.0):
        raise NegativeUnderlying("proportional volatility needs strictly positive prices")
    tau = stats.tau
    if not 0.0 < tau < 1.0:
        raise NoMeanReversion(f"AR(1) slope {tau:.6g} outside (0, 1)")
    e = (y - tau * x - stats.mu) / x
    n = e.size
    sd = math.sqrt(math.fsum(e * e) / (n - 2))
    log_tau = math.log(tau)
    sigma = sd * math.sqrt(-2.0 * log_tau / (series.step * (1.0 - tau * tau)))
    if sigma <= 0.0:
        raise DegenerateVolatility("residual standard deviation is zero")
    return sigma


def normal_vol(series: PriceSeries) -> float:
    """Annualised absolute volatility of price increments (Bachelier)."""
    d = np.diff(series.values)
    sd = float(np.std(d, ddof=1))
    if sd <= 0.0:
        raise DegenerateVolatility("price increments have zero variance")
    return sd / math.sqrt(series.step)


def lognormal_vol(series: PriceSeries) -> float:
    """Annualised volatility of log returns (Black-76); needs positive prices."""
    f = series.values
    if np.any(f <= 0.0):
        raise ZeroPrice("log returns need strictly positive prices")
    sd = float(np.std(np.diff(np.log(f)), ddof=1))
    if sd <= 0.0:
        raise DegenerateVolatility("log returns have zero variance")
    return sd / math.sqrt(series.step)


def market_price_of_risk(series: PriceSeries, rate: float, sigma: float) -> float:
    """Excess annualised mean simple return per unit of volatility."""
    if not sigma > 0.0:
        raise ZeroVolatility(f"sigma must be > 0, got {sigma}")
    f = series.values
    if np.any(f == 0.0):
        raise ZeroPrice("returns are undefined at a zero price")
    returns = f[1:] / f[:-1] - 1.0
    mean_return = math.fsum(returns) / returns.size / series.step
    return (mean_return - rate) / sigma


def risk_neutralize(params: OuParams, lam: float, model: ModelKind) -> RiskNeutralParams:
    model = ModelKind(model)
    a, b, sigma = params.a, params.b, params.sigma
    if model in (ModelKind.OU, ModelKind.VASICEK):
        return RiskNeutralParams(a, b - lam * sigma / a, lam, model)
    if model is ModelKind.CONTINUOUS_GARCH:
        a_star = a + lam * sigma
        if a_star <= 0.0:
            raise SignFlip(f"a + lambda*sigma = {a_star:.6g} <= 0")
        return RiskNeutralParams(a_star, a * b / a_star, lam, model)
    raise UnsupportedModel(f"{model.value} takes no mean-reversion adjustment")
