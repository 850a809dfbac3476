"""European options on futures whose prices may be negative or mean-reverting."""

from futopt.calibration import (
    calibrate,
    market_price_of_risk,
    ols_ar1,
    params_from_regression,
    risk_neutralize,
)
from futopt.domain import (
    ModelKind,
    OptionSpec,
    OuParams,
    PriceQuote,
    PriceSeries,
    RegressionStats,
    RiskNeutralParams,
    validate_series,
)
from futopt.montecarlo import (
    PathSet,
    SimulationPlan,
    mc_price,
    simulate_garch_path,
    simulate_ou_path,
)
from futopt.pricing import (
    bachelier_call,
    black76_call,
    black76_put,
    gaussian_call,
    ou_terminal_moments,
    vasicek_call,
    vasicek_call_paper,
)
from futopt.selector import diagnose, recommend

__version__ = "0.1.0"
