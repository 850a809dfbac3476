"""Seeded path simulation and Monte Carlo option pricing.

Paths are generated in fixed-size blocks. Normals come from a Philox
counter-based generator keyed by the seed, with the block and time-step
indices placed in the counter, so every path's randomness depends only on
``(seed, path index)``. Threads only decide which block is computed when;
results are reassembled in block order, making estimates bit-identical for
any worker count.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from futopt.domain import Method, OptionSpec, OuParams, PriceQuote
from futopt.errors import BudgetExceeded, HorizonMismatch, InvalidParameter
from futopt.normal import norm_ppf_array

BLOCK_SIZE = 4096
DEFAULT_BUDGET = 2_000_000_000
PRICING_PATHS = 100_000
REPLICATION_PATHS = 20

_U64 = (1 << 64) - 1
_TWO_POW_M53 = 2.0**-53


class Scheme(str, enum.Enum):
    OU_EXACT = "OU-exact"
    GARCH_RECURSION = "GARCH-recursion"


@dataclass(frozen=True)
class SimulationPlan:
    n_paths: int
    n_steps: int
    step: float
    seed: int = 0
    scheme: Scheme = Scheme.OU_EXACT
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.n_paths < 1 or self.n_steps < 1:
            raise InvalidParameter("n_paths and n_steps must be >= 1")
        if not (math.isfinite(self.step) and self.step > 0):
            raise InvalidParameter(f"step must be positive, got {self.step}")
        if not 0 <= self.seed <= _U64:
            raise InvalidParameter("seed must fit in an unsigned 64-bit integer")
        if self.n_paths * self.n_steps > self.budget:
            raise BudgetExceeded(
                f"{self.n_paths} paths x {self.n_steps} steps exceeds budget {self.budget}"
            )
        object.__setattr__(self, "scheme", Scheme(self.scheme))

    @property
    def horizon(self) -> float:
        return self.n_steps * self.step

    @classmethod
    def over(cls, horizon: float, n_steps: int, **kwargs) -> "SimulationPlan":
        """Plan whose steps exactly cover ``horizon``."""
        return cls(n_steps=n_steps, step=horizon / n_steps, **kwargs)


@dataclass(frozen=True)
class PathSet:
    """Simulated terminal prices, optionally with the full grid.

    ``paths`` has one row per time point (``n_steps + 1`` rows, first row the
    start price) and one column per path.
    """

    terminal: np.ndarray
    horizon: float
    paths: Optional[np.ndarray] = None

    @property
    def n_paths(self) -> int:
        return self.terminal.size


@dataclass(frozen=True)
class McEstimate:
    price: float
    std_error: Optional[float]
    n_paths: int

    def quote(self, model: str) -> PriceQuote:
        return PriceQuote(self.price, Method.MONTE_CARLO, model, self.std_error)


def _normals(seed: int, block: int, step_index: int, count: int) -> np.ndarray:
    """Standard normals for the first ``count`` paths of ``block`` at one time step.

    Each (block, step) pair owns a Philox stream starting at its own counter
    offset, so path ``j`` always reads raw draw ``j`` of that stream whatever
    the total number of paths.
    """
    bitgen = np.random.Philox(key=seed, counter=[0, step_index, block, 0])
    raw = bitgen.random_raw(count)
    # 53-bit midpoint grid keeps u strictly inside (0, 1)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_POW_M53
    return norm_ppf_array(u)


def _unpack(params) -> tuple[float, float, float]:
    if isinstance(params, OuParams):
        return params.a, params.b, params.sigma
    a, b, sigma = (float(v) for v in params)
    if not (math.isfinite(a) and a > 0):
        raise InvalidParameter(f"a* must be > 0, got {a}")
    if not (math.isfinite(sigma) and sigma >= 0):
        raise InvalidParameter(f"sigma must be >= 0, got {sigma}")
    if not math.isfinite(b):
        raise InvalidParameter(f"b* must be finite, got {b}")
    return a, b, sigma


def _coefficients(params, step: float, verbatim_growth: bool):
    a, b, sigma = _unpack(params)
    decay = math.exp(-a * step)
    growth = math.exp(a * step) if verbatim_growth else decay
    drift = b * -math.expm1(-a * step)
    noise = sigma * math.sqrt(-math.expm1(-2.0 * a * step) / (2.0 * a))
    return growth, drift, noise


def _simulate(params, f0: float, plan: SimulationPlan, proportional: bool,
              verbatim_growth: bool, keep_paths: bool, workers: int) -> PathSet:
    growth, drift, noise = _coefficients(params, plan.step, verbatim_growth)
    f0 = float(f0)
    n_blocks = -(-plan.n_paths // BLOCK_SIZE)

    def run_block(block: int):
        count = min(BLOCK_SIZE, plan.n_paths - block * BLOCK_SIZE)
        f = np.full(count, f0)
        grid = np.empty((plan.n_steps + 1, count)) if keep_paths else None
        if keep_paths:
            grid[0] = f
        for i in range(plan.n_steps):
            z = _normals(plan.seed, block, i, count)
            scale = noise * f if proportional else noise
            f = growth * f + drift + scale * z
            if keep_paths:
                grid[i + 1] = f
        return f, grid

    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_block, range(n_blocks)))
    else:
        results = [run_block(k) for k in range(n_blocks)]

    terminal = np.concatenate([r[0] for r in results])
    paths = np.hstack([r[1] for r in results]) if keep_paths else None
    return PathSet(terminal, plan.horizon, paths)


def simulate_ou_path(params, f0: float, plan: SimulationPlan, *,
                     keep_paths: bool = False, workers: int = 1) -> PathSet:
    """Exact OU/Vasicek transitions.

    ``params`` is an ``OuParams`` or an ``(a*, b*, sigma)`` tuple holding the
    risk-neutral dynamics; the tuple form admits sigma = 0.

    F_{i+1} = F_i e^{-a d} + b (1 - e^{-a d}) + sigma sqrt((1 - e^{-2 a d}) / 2a) Z_i
    """
    return _simulate(params, f0, plan, proportional=False, verbatim_growth=False,
                     keep_paths=keep_paths, workers=workers)


def simulate_garch_path(params, f0: float, plan: SimulationPlan, *,
                        verbatim_growth: bool = False, keep_paths: bool = False,
                        workers: int = 1) -> PathSet:
    """Continuous-time GARCH recursion with noise proportional to the price.

    F_{i+1} = F_i g + b (1 - e^{-a d}) + sigma F_i sqrt((1 - e^{-2 a d}) / 2a) Z_i

    where g = e^{-a d}. ``verbatim_growth=True`` switches to g = e^{+a d} for
    audit runs; paths then grow instead of reverting.
    """
    return _simulate(params, f0, plan, proportional=True, verbatim_growth=verbatim_growth,
                     keep_paths=keep_paths, workers=workers)


def simulate(params, f0: float, plan: SimulationPlan, **kwargs) -> PathSet:
    if plan.scheme is Scheme.GARCH_RECURSION:
        return simulate_garch_path(params, f0, plan, **kwargs)
    kwargs.pop("verbatim_growth", None)
    return simulate_ou_path(params, f0, plan, **kwargs)


def mc_price(paths: PathSet, spec: OptionSpec,
             mode: Literal["standard", "paper-average"] = "standard") -> McEstimate:
    """Discounted option value from simulated terminal prices.

    ``standard`` averages payoffs. ``paper-average`` averages the terminal
    prices first and applies the payoff once; it carries no standard error
    and is never above the standard estimate for a convex payoff.
    """
    if not math.isclose(paths.horizon, spec.horizon, rel_tol=1e-9, abs_tol=1e-12):
        raise HorizonMismatch(
            f"paths end at {paths.horizon}, option horizon is {spec.horizon}"
        )
    n = paths.n_paths
    disc = spec.discount
    sign = 1.0 if spec.kind == "call" else -1.0
    # (F - K) for calls, (K - F) for puts; shared by both modes so the
    # paper-average value is provably <= the standard one.
    moneyness = sign * (paths.terminal - spec.strike)
    if mode == "standard":
        payoff = np.maximum(moneyness, 0.0)
        price = disc * (math.fsum(payoff) / n)
        se = disc * float(np.std(payoff, ddof=1)) / math.sqrt(n) if n > 1 else 0.0
        return McEstimate(price, se, n)
    if mode == "paper-average":
        price = disc * max(math.fsum(moneyness) / n, 0.0)
        return McEstimate(price, None, n)
    raise InvalidParameter(f"unknown mode {mode!r}")
