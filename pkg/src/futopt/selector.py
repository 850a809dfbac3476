"""Classify a price series by sign and mean reversion, then pick a model."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from futopt.calibration import ols_ar1
from futopt.domain import ModelKind, PriceSeries
from futopt.errors import InvalidParameter

DEFAULT_ZERO_TOL = 0.1
# large-sample 5% Dickey-Fuller critical value (with intercept)
DEFAULT_CRITICAL = -2.86


class Sign(str, enum.Enum):
    ALL_POSITIVE = "all-positive"
    MIXED = "mixed-sign"


@dataclass(frozen=True)
class SeriesDiagnosis:
    sign: Sign
    level: Optional[float]  # None means no mean reversion
    tau: float
    t_stat: float

    def __post_init__(self):
        object.__setattr__(self, "sign", Sign(self.sign))
        if self.level is not None and not math.isfinite(self.level):
            raise InvalidParameter(f"level must be finite, got {self.level}")

    @property
    def mean_reverting(self) -> bool:
        return self.level is not None


def diagnose(series: PriceSeries, zero_tol: float = DEFAULT_ZERO_TOL,
             critical: float = DEFAULT_CRITICAL) -> SeriesDiagnosis:
    """Sign of the prices and a unit-root test on the AR(1) slope.

    Mean reversion is declared when (tau - 1) / se(tau) falls below
    ``critical``. The fitted level b = mu / (1 - tau) is reported as exactly
    zero when it lies within ``zero_tol`` sample standard deviations of zero.
    """
    f = series.values
    sign = Sign.ALL_POSITIVE if float(np.min(f)) > 0.0 else Sign.MIXED
    stats = ols_ar1(series)
    se = stats.tau_std_error
    if se > 0.0:
        t_stat = (stats.tau - 1.0) / se
    else:
        t_stat = -math.inf if stats.tau < 1.0 else math.inf
    if not t_stat < critical:
        return SeriesDiagnosis(sign, None, stats.tau, t_stat)
    level = stats.mu / (1.0 - stats.tau)
    if abs(level) <= zero_tol * float(np.std(f, ddof=1)):
        level = 0.0
    return SeriesDiagnosis(sign, level, stats.tau, t_stat)


def recommend(diag: SeriesDiagnosis) -> ModelKind:
    if diag.sign is Sign.ALL_POSITIVE:
        return ModelKind.GBM_BLACK76 if diag.level is None else ModelKind.CONTINUOUS_GARCH
    if diag.level is None:
        return ModelKind.BACHELIER
    return ModelKind.OU if diag.level == 0.0 else ModelKind.VASICEK
