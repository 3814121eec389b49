"""Performance metrics: per-period returns, Sharpe, wealth, drawdown, volatility.

Conventions used throughout:
- net returns are fractions (0.02 means +2% for the period);
- an all-zero weight vector means cash, which returns exactly 0;
- standard deviations are population (divide by the series length);
- Sharpe denominators carry a 1e-12 floor so constant series stay finite.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import BankruptcyError, InsufficientDataError

VARIANCE_FLOOR = 1e-12


def per_period_return(weights: np.ndarray, gross_returns: np.ndarray) -> float:
    """Net portfolio return for one period: weights . gross_returns - 1.

    An all-zero weight vector is the cash position and returns exactly 0.0.
    """
    weights = np.asarray(weights, dtype=float)
    gross_returns = np.asarray(gross_returns, dtype=float)
    if weights.shape != gross_returns.shape or weights.ndim != 1:
        raise ValueError(
            f"weights and returns disagree in shape: {weights.shape} vs {gross_returns.shape}"
        )
    if np.all(weights == 0.0):
        return 0.0
    return float(weights @ gross_returns) - 1.0


def _mean_std(net_returns: np.ndarray) -> tuple[float, float]:
    mu = float(net_returns.mean())
    sd = float(net_returns.std())
    return mu, sd


def sharpe_ratio(net_returns) -> float:
    """Mean over population standard deviation, with a 1e-12 floor."""
    r = np.asarray(net_returns, dtype=float)
    if r.size < 2:
        raise InsufficientDataError("sharpe ratio needs at least 2 returns")
    mu, sd = _mean_std(r)
    return mu / (sd + VARIANCE_FLOOR)


def cumulative_wealth(net_returns) -> np.ndarray:
    """Wealth trajectory from compounding: CW_t = prod_{s<=t} (1 + r_s)."""
    r = np.asarray(net_returns, dtype=float)
    if r.size == 0:
        raise InsufficientDataError("cumulative wealth needs at least 1 return")
    if np.any(r <= -1.0):
        worst = float(r.min())
        raise BankruptcyError(f"net return {worst} wipes out the portfolio")
    return np.cumprod(1.0 + r)


def max_drawdown(cw) -> tuple[float, float]:
    """Absolute and relative maximum drawdown of a wealth trajectory.

    Absolute: max_t (peak_t - CW_t). Relative: max_t (peak_t - CW_t)/peak_t,
    where peak_t is the running maximum. Both are 0 for monotone series.
    """
    w = np.asarray(cw, dtype=float)
    if w.size == 0:
        raise InsufficientDataError("drawdown needs a nonempty wealth series")
    if np.any(w <= 0.0):
        raise ValueError("wealth series must be strictly positive")
    peak = np.maximum.accumulate(w)
    dd_abs = float(np.max(peak - w))
    dd_rel = float(np.max((peak - w) / peak))
    return dd_abs, dd_rel


def annualized_volatility(sigma: float, periods_per_year: int) -> float:
    """Scale a per-period standard deviation by sqrt(periods per year)."""
    if sigma < 0.0:
        raise ValueError("sigma must be non-negative")
    if periods_per_year <= 0:
        raise ValueError("periods_per_year must be positive")
    return math.sqrt(periods_per_year) * sigma


@dataclass(frozen=True)
class PerformanceReport:
    """Summary metrics of one realized return series."""

    sharpe: float
    sharpe_x100: float
    cumulative_wealth: float
    max_drawdown_abs: float
    max_drawdown_rel: float
    volatility_annualized: float
    mean_return: float
    std_return: float
    zero_variance: bool

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PerformanceReport":
        return cls(**data)


def compute_report(net_returns, periods_per_year: int) -> PerformanceReport:
    """Build the full report for a realized net-return series (length >= 1).

    A single-period series has zero population deviation; the Sharpe ratio
    is then floor-clamped and flagged via ``zero_variance``.
    """
    r = np.asarray(net_returns, dtype=float)
    if r.size == 0:
        raise InsufficientDataError("report needs at least 1 realized return")
    mu, sd = _mean_std(r)
    sr = mu / (sd + VARIANCE_FLOOR)
    cw = cumulative_wealth(r)
    dd_abs, dd_rel = max_drawdown(cw)
    return PerformanceReport(
        sharpe=sr,
        sharpe_x100=100.0 * sr,
        cumulative_wealth=float(cw[-1]),
        max_drawdown_abs=dd_abs,
        max_drawdown_rel=dd_rel,
        volatility_annualized=annualized_volatility(sd, periods_per_year),
        mean_return=mu,
        std_return=sd,
        zero_variance=(sd == 0.0),
    )
