"""Closed-form European option values on futures.

Black-76 needs a strictly positive forward and strike. The Gaussian pricers
(Bachelier, OU/Vasicek) accept any sign for both, which is the point of
having them.
"""

from __future__ import annotations

import math

from futopt.domain import Method, OptionSpec, OuParams, PriceQuote, RiskNeutralParams
from futopt.errors import (
    InvalidParameter,
    NegativeStd,
    NegativeStrike,
    NegativeUnderlying,
    NonPositiveVol,
)
from futopt.normal import norm_cdf, norm_pdf

BLACK76 = "GBM-Black76"
BACHELIER = "Bachelier"
VASICEK = "Vasicek"
GAUSSIAN = "Gaussian"


# ---------- Black-76 ----------


def _black76_inputs(spec: OptionSpec, sigma: float):
    if spec.forward <= 0.0:
        raise NegativeUnderlying(
            f"Black-76 requires a positive futures price, got {spec.forward}"
        )
    if spec.strike <= 0.0:
        raise NegativeStrike(f"Black-76 requires a positive strike, got {spec.strike}")
    if not sigma > 0.0:
        raise NonPositiveVol(f"sigma must be > 0, got {sigma}")
    T = spec.horizon
    s = sigma * math.sqrt(T)
    d1 = (math.log(spec.forward / spec.strike) + 0.5 * s * s) / s
    return d1, d1 - s


def black76_call(spec: OptionSpec, sigma: float) -> PriceQuote:
    d1, d2 = _black76_inputs(spec, sigma)
    value = spec.discount * (spec.forward * norm_cdf(d1) - spec.strike * norm_cdf(d2))
    return PriceQuote(max(value, 0.0), Method.CLOSED_FORM, BLACK76)


def black76_put(spec: OptionSpec, sigma: float) -> PriceQuote:
    # put-call parity, so C - P matches discounted (F - K) to rounding
    call = black76_call(spec, sigma).value
    value = call - spec.discount * (spec.forward - spec.strike)
    return PriceQuote(max(value, 0.0), Method.CLOSED_FORM, BLACK76)


def black76(spec: OptionSpec, sigma: float) -> PriceQuote:
    return black76_call(spec, sigma) if spec.kind == "call" else black76_put(spec, sigma)


# ---------- Gaussian terminal law ----------


def _gaussian_call_value(mean: float, std: float, strike: float, rate: float, horizon: float) -> float:
    if std < 0.0:
        raise NegativeStd(f"std must be >= 0, got {std}")
    if horizon < 0.0:
        raise InvalidParameter(f"horizon must be >= 0, got {horizon}")
    disc = math.exp(-rate * horizon)
    moneyness = mean - strike
    if std == 0.0:
        return disc * max(moneyness, 0.0)
    d = moneyness / std
    return max(disc * (moneyness * norm_cdf(d) + std * norm_pdf(d)), 0.0)


def gaussian_call(mean: float, std: float, strike: float, rate: float, horizon: float) -> PriceQuote:
    """Discounted E[(X - K)+] for X ~ N(mean, std^2)."""
    value = _gaussian_call_value(mean, std, strike, rate, horizon)
    return PriceQuote(value, Method.CLOSED_FORM, GAUSSIAN)


def gaussian_put(mean: float, std: float, strike: float, rate: float, horizon: float) -> PriceQuote:
    call = _gaussian_call_value(mean, std, strike, rate, horizon)
    value = call - math.exp(-rate * horizon) * (mean - strike)
    return PriceQuote(max(value, 0.0), Method.CLOSED_FORM, GAUSSIAN)


def ou_terminal_moments(params: OuParams, f0: float, horizon: float) -> tuple[float, float]:
    """Mean and variance of the OU/Vasicek price ``horizon`` years ahead."""
    if horizon < 0.0:
        raise InvalidParameter(f"horizon must be >= 0, got {horizon}")
    a, b, sigma = params.a, params.b, params.sigma
    decay = math.exp(-a * horizon)
    mean = decay * f0 + b * (1.0 - decay)
    # -expm1 keeps precision for small a*horizon
    variance = sigma * sigma * -math.expm1(-2.0 * a * horizon) / (2.0 * a)
    return mean, variance


# ---------- OU / Vasicek ----------


def _vasicek_moments(spec: OptionSpec, rn: RiskNeutralParams, sigma: float):
    if not sigma > 0.0:
        raise NonPositiveVol(f"sigma must be > 0, got {sigma}")
    return ou_terminal_moments(rn.dynamics(sigma), spec.forward, spec.horizon)


def vasicek_call(spec: OptionSpec, rn: RiskNeutralParams, sigma: float) -> PriceQuote:
    mean, var = _vasicek_moments(spec, rn, sigma)
    value = _gaussian_call_value(mean, math.sqrt(var), spec.strike, spec.rate, spec.horizon)
    return PriceQuote(value, Method.CLOSED_FORM, rn.model.value)


def vasicek_put(spec: OptionSpec, rn: RiskNeutralParams, sigma: float) -> PriceQuote:
    mean, var = _vasicek_moments(spec, rn, sigma)
    q = gaussian_put(mean, math.sqrt(var), spec.strike, spec.rate, spec.horizon)
    return PriceQuote(q.value, Method.CLOSED_FORM, rn.model.value)


def vasicek(spec: OptionSpec, rn: RiskNeutralParams, sigma: float) -> PriceQuote:
    if spec.kind == "call":
        return vasicek_call(spec, rn, sigma)
    return vasicek_put(spec, rn, sigma)


def vasicek_call_paper(spec: OptionSpec, rn: RiskNeutralParams, sigma: float) -> PriceQuote:
    """Call value from the xi/zeta expression, evaluated exactly as written.

    xi_pm = exp(+-a T_e) (F - b*) - K and zeta = sigma sqrt((1 - exp(-2 a T_e)) / 2a),
    value = exp(-r (T_e - t)) [xi_+ Phi(xi_-/zeta) + zeta Phi'(xi_-/zeta)].

    Unlike ``vasicek_call`` this is not the discounted Gaussian expectation:
    the growth factor of xi_+ and the missing level term make it disagree with
    Monte Carlo whenever a T_e or b* is not small. Kept for comparison
    reports; the value may even be negative.
    """
    if not sigma > 0.0:
        raise NonPositiveVol(f"sigma must be > 0, got {sigma}")
    a = rn.a_star
    T = spec.expiry
    gap = spec.forward - rn.b_star
    xi_plus = math.exp(a * T) * gap - spec.strike
    xi_minus = math.exp(-a * T) * gap - spec.strike
    zeta = sigma * math.sqrt(-math.expm1(-2.0 * a * T) / (2.0 * a))
    if zeta == 0.0:
        bracket = xi_plus if xi_minus > 0.0 else 0.0
    else:
        z = xi_minus / zeta
        bracket = xi_plus * norm_cdf(z) + zeta * norm_pdf(z)
    return PriceQuote(spec.discount * bracket, Method.PAPER_VERBATIM, rn.model.value)


# ---------- Bachelier ----------


def _bachelier_std(spec: OptionSpec, sigma_n: float) -> float:
    if not sigma_n > 0.0:
        raise NonPositiveVol(f"normal volatility must be > 0, got {sigma_n}")
    return sigma_n * math.sqrt(spec.horizon)


def bachelier_call(spec: OptionSpec, sigma_n: float) -> PriceQuote:
    std = _bachelier_std(spec, sigma_n)
    value = _gaussian_call_value(spec.forward, std, spec.strike, spec.rate, spec.horizon)
    return PriceQuote(value, Method.CLOSED_FORM, BACHELIER)


def bachelier_put(spec: OptionSpec, sigma_n: float) -> PriceQuote:
    std = _bachelier_std(spec, sigma_n)
    q = gaussian_put(spec.forward, std, spec.strike, spec.rate, spec.horizon)
    return PriceQuote(q.value, Method.CLOSED_FORM, BACHELIER)


def bachelier(spec: OptionSpec, sigma_n: float) -> PriceQuote:
    if spec.kind == "call":
        return bachelier_call(spec, sigma_n)
    return bachelier_put(spec, sigma_n)
