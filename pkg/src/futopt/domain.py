"""Shared value types.

All types are frozen dataclasses that validate in ``__post_init__``; an
instance that exists satisfies its invariants.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from futopt.errors import (
    InvalidParameter,
    NonFiniteValue,
    NonPositiveStep,
    TooShort,
)

TRADING_DAYS = 252


class ModelKind(str, enum.Enum):
    """The five rows of the model recommendation table."""

    GBM_BLACK76 = "GBM-Black76"
    CONTINUOUS_GARCH = "ContinuousGARCH"
    OU = "OU"
    VASICEK = "Vasicek"
    BACHELIER = "Bachelier"

    @classmethod
    def parse(cls, text: str) -> "ModelKind":
        key = text.strip().lower().replace("_", "-")
        aliases = {
            "gbm": cls.GBM_BLACK76,
            "black76": cls.GBM_BLACK76,
            "black-76": cls.GBM_BLACK76,
            "gbm-black76": cls.GBM_BLACK76,
            "garch": cls.CONTINUOUS_GARCH,
            "continuousgarch": cls.CONTINUOUS_GARCH,
            "ou": cls.OU,
            "vasicek": cls.VASICEK,
            "bachelier": cls.BACHELIER,
        }
        try:
            return aliases[key]
        except KeyError:
            raise InvalidParameter(f"unknown model {text!r}") from None


class Method(str, enum.Enum):
    CLOSED_FORM = "closed-form"
    MONTE_CARLO = "monte-carlo"
    PAPER_VERBATIM = "paper-verbatim"


def _finite(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise NonFiniteValue(f"{name} must be finite, got {x}")
    return x


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """Futures settlement prices observed every ``step`` years."""

    values: np.ndarray
    step: float
    label: str = ""

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).ravel()
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise NonFiniteValue(f"non-finite price at index {int(bad[0])}")
        step = float(self.step)
        if not (math.isfinite(step) and step > 0):
            raise NonPositiveStep(f"step must be positive and finite, got {self.step}")
        if values.size < 3:
            raise TooShort(f"need at least 3 prices, got {values.size}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "step", step)

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, PriceSeries):
            return NotImplemented
        return (
            self.step == other.step
            and self.label == other.label
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    @property
    def last(self) -> float:
        return float(self.values[-1])


def validate_series(values: Sequence[float], step: float, label: str = "") -> PriceSeries:
    return PriceSeries(values, step, label)


@dataclass(frozen=True)
class RegressionStats:
    # AR(1) fit F_i = tau * F_{i-1} + mu + e_i and the five raw sums behind it
    n: int
    f_x: float
    f_y: float
    f_xx: float
    f_yy: float
    f_xy: float
    tau: float
    mu: float
    sd_e: float

    def __post_init__(self):
        if self.n < 2:
            raise InvalidParameter(f"n must be >= 2, got {self.n}")
        if not self.sd_e >= 0:
            raise InvalidParameter(f"sd_e must be >= 0, got {self.sd_e}")

    @property
    def sxx(self) -> float:
        """Centred sum of squares of the regressor."""
        return (self.n * self.f_xx - self.f_x**2) / self.n

    @property
    def tau_std_error(self) -> float:
        return self.sd_e / math.sqrt(self.sxx)


@dataclass(frozen=True)
class OuParams:
    """Mean-reversion rate ``a``, level ``b`` and volatility ``sigma``."""

    a: float
    b: float
    sigma: float

    def __post_init__(self):
        for name in ("a", "b", "sigma"):
            _finite(name, getattr(self, name))
        if self.a <= 0:
            raise InvalidParameter(f"a must be > 0, got {self.a}")
        if self.sigma <= 0:
            raise InvalidParameter(f"sigma must be > 0, got {self.sigma}")


@dataclass(frozen=True)
class RiskNeutralParams:
    a_star: float
    b_star: float
    lam: float
    model: ModelKind

    def __post_init__(self):
        for name in ("a_star", "b_star", "lam"):
            _finite(name, getattr(self, name))
        if self.a_star <= 0:
            raise InvalidParameter(f"a_star must be > 0, got {self.a_star}")

    def dynamics(self, sigma: float) -> OuParams:
        """Risk-neutral (a*, b*, sigma) packaged for the simulators."""
        return OuParams(self.a_star, self.b_star, sigma)


@dataclass(frozen=True)
class OptionSpec:
    strike: float
    expiry: float
    forward: float
    rate: float = 0.0
    valuation_time: float = 0.0
    kind: Literal["call", "put"] = "call"

    def __post_init__(self):
        for name in ("strike", "expiry", "forward", "rate", "valuation_time"):
            _finite(name, getattr(self, name))
        if not self.expiry > self.valuation_time:
            raise InvalidParameter(
                f"expiry ({self.expiry}) must be after valuation time ({self.valuation_time})"
            )
        if self.kind not in ("call", "put"):
            raise InvalidParameter(f"kind must be 'call' or 'put', got {self.kind!r}")

    @property
    def horizon(self) -> float:
        return self.expiry - self.valuation_time

    @property
    def discount(self) -> float:
        return math.exp(-self.rate * self.horizon)


@dataclass(frozen=True)
class PriceQuote:
    value: float
    method: Method
    model: str
    std_error: Optional[float] = None

    def __post_init__(self):
        if self.method is Method.MONTE_CARLO:
            if self.std_error is not None and not self.std_error >= 0:
                raise InvalidParameter(f"std_error must be >= 0, got {self.std_error}")
        elif self.std_error is not None:
            raise InvalidParameter("std_error is only carried by monte-carlo quotes")
        if self.method is Method.CLOSED_FORM and not self.value >= 0:
            raise InvalidParameter(f"closed-form value must be >= 0, got {self.value}")
