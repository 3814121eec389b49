"""Thompson-sampling strategy switching over classic portfolio rules.

A deterministic backtest engine plus CLI. Five allocation rules (buy and
hold, stand aside, equal weight, value weighted, mean-variance) act as
bandit arms; a Beta-Bernoulli Thompson sampler picks one each period and
is rewarded when the pick's trailing Sharpe ratio weakly beats at least
``c`` of the arms.
"""

from .arms import (
    Arm,
    DEFAULT_ROSTER,
    MomentEstimate,
    arm_weights,
    estimate_moments,
    solve_mv_qp,
    validate_weights,
    weights_bh,
    weights_ew,
    weights_sa,
    weights_vw,
)
from .bandit import (
    ArmReturnHistory,
    BetaState,
    FAILURE,
    SUCCESS,
    SelectionRecord,
    evaluate_reward,
    sample_thetas,
    select_arm,
    update_posterior,
)
from .engine import (
    BacktestConfig,
    BacktestResult,
    SweepRow,
    SweepSummary,
    counterfactual_arm_returns,
    run_backtest,
    run_c_sweep,
)
from .errors import (
    BanditfolioError,
    BankruptcyError,
    ConfigError,
    InsufficientDataError,
    PanelFormatError,
    SingularCovarianceError,
    WindowBoundsError,
)
from .market_data import (
    PERIODS_PER_YEAR,
    PricePanel,
    ReturnPanel,
    filter_complete_assets,
    load_ff_returns_csv,
    load_price_panel_csv,
    prices_to_returns,
    slice_window,
)
from .metrics import (
    PerformanceReport,
    annualized_volatility,
    compute_report,
    cumulative_wealth,
    max_drawdown,
    per_period_return,
    sharpe_ratio,
)

__version__ = "0.1.0"

__all__ = [
    "Arm",
    "ArmReturnHistory",
    "BacktestConfig",
    "BacktestResult",
    "BanditfolioError",
    "BankruptcyError",
    "BetaState",
    "ConfigError",
    "DEFAULT_ROSTER",
    "FAILURE",
    "InsufficientDataError",
    "MomentEstimate",
    "PERIODS_PER_YEAR",
    "PanelFormatError",
    "PerformanceReport",
    "PricePanel",
    "ReturnPanel",
    "SUCCESS",
    "SelectionRecord",
    "SingularCovarianceError",
    "SweepRow",
    "SweepSummary",
    "WindowBoundsError",
    "annualized_volatility",
    "arm_weights",
    "compute_report",
    "counterfactual_arm_returns",
    "cumulative_wealth",
    "estimate_moments",
    "evaluate_reward",
    "filter_complete_assets",
    "load_ff_returns_csv",
    "load_price_panel_csv",
    "max_drawdown",
    "per_period_return",
    "prices_to_returns",
    "run_backtest",
    "run_c_sweep",
    "sample_thetas",
    "select_arm",
    "sharpe_ratio",
    "slice_window",
    "solve_mv_qp",
    "update_posterior",
    "validate_weights",
    "weights_bh",
    "weights_ew",
    "weights_sa",
    "weights_vw",
]
