"""Deterministic backtest engine: Thompson sampling over strategy arms.

Each period the engine computes every arm's weights from information
available before the period, samples the posterior, and plays the argmax
arm. The first ``tau`` periods are a warm-up: the bandit selects and
learns, but no capital moves and nothing is realized. Counterfactual net
returns for every arm accumulate from the first period, and the play is
judged each period against trailing Sharpe ratios of those histories.

All randomness flows from the single config seed through one generator,
so a run is a pure function of (panel, config).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .arms import DEFAULT_ROSTER, Arm, arm_weights, weights_ew
from .bandit import (
    ArmReturnHistory,
    BetaState,
    SelectionRecord,
    evaluate_reward,
    sample_thetas,
    select_arm,
    update_posterior,
)
from .errors import ConfigError, InsufficientDataError
from .market_data import ReturnPanel, slice_window
from .metrics import PerformanceReport, compute_report, cumulative_wealth, per_period_return


@dataclass(frozen=True)
class BacktestConfig:
    """Immutable run parameters.

    tau: warm-up length and trailing-window size, in periods.
    c: success threshold; a play succeeds when its Sharpe weakly beats
       at least c of the roster's arms (itself included).
    """

    tau: int = 120
    c: int = 3
    seed: int = 0
    sr_lookback: int = 36
    ridge_scale: float = 1e-6
    arms: tuple[Arm, ...] = DEFAULT_ROSTER

    def __post_init__(self):
        arms = tuple(self.arms)
        object.__setattr__(self, "arms", arms)
        if len(arms) == 0:
            raise ConfigError("arm roster is empty")
        if len(set(arms)) != len(arms):
            raise ConfigError("arm roster contains duplicates")
        if self.tau < 2:
            raise ConfigError(f"tau must be >= 2, got {self.tau}")
        if not 1 <= self.c <= len(arms):
            raise ConfigError(f"c={self.c} outside 1..{len(arms)}")
        if self.sr_lookback < 1:
            raise ConfigError(f"sr_lookback must be >= 1, got {self.sr_lookback}")
        if self.ridge_scale < 0.0:
            raise ConfigError(f"ridge_scale must be >= 0, got {self.ridge_scale}")

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "c": self.c,
            "seed": self.seed,
            "sr_lookback": self.sr_lookback,
            "ridge_scale": self.ridge_scale,
            "arms": [a.name for a in self.arms],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BacktestConfig":
        return cls(
            tau=int(data["tau"]),
            c=int(data["c"]),
            seed=int(data["seed"]),
            sr_lookback=int(data["sr_lookback"]),
            ridge_scale=float(data["ridge_scale"]),
            arms=tuple(Arm[name] for name in data["arms"]),
        )


@dataclass
class BacktestResult:
    """Everything one run produced, losslessly serializable to JSON."""

    config: BacktestConfig
    periodicity: str
    asset_ids: tuple[str, ...]
    traded_dates: tuple[str, ...]
    selections: list[SelectionRecord]
    realized_net_returns: np.ndarray
    weight_trajectory: np.ndarray
    cw_curve: np.ndarray
    counterfactual: ArmReturnHistory
    posterior: BetaState
    report: PerformanceReport

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "periodicity": self.periodicity,
            "asset_ids": list(self.asset_ids),
            "traded_dates": list(self.traded_dates),
            "selections": [s.to_dict() for s in self.selections],
            "realized_net_returns": [float(v) for v in self.realized_net_returns],
            "weight_trajectory": [[float(v) for v in row] for row in self.weight_trajectory],
            "cw_curve": [float(v) for v in self.cw_curve],
            "counterfactual": {
                "arms": [a.name for a in self.counterfactual.arms],
                "returns": [[float(v) for v in series] for series in self.counterfactual.returns],
            },
            "posterior": {
                "arms": [a.name for a in self.posterior.arms],
                "alpha": [float(v) for v in self.posterior.alphas],
                "beta": [float(v) for v in self.posterior.betas],
            },
            "report": self.report.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BacktestResult":
        cf = data["counterfactual"]
        post = data["posterior"]
        return cls(
            config=BacktestConfig.from_dict(data["config"]),
            periodicity=str(data["periodicity"]),
            asset_ids=tuple(data["asset_ids"]),
            traded_dates=tuple(data["traded_dates"]),
            selections=[SelectionRecord.from_dict(s) for s in data["selections"]],
            realized_net_returns=np.array(data["realized_net_returns"], dtype=float),
            weight_trajectory=np.array(data["weight_trajectory"], dtype=float),
            cw_curve=np.array(data["cw_curve"], dtype=float),
            counterfactual=ArmReturnHistory(
                tuple(Arm[name] for name in cf["arms"]),
                [[float(v) for v in series] for series in cf["returns"]],
            ),
            posterior=BetaState(
                tuple(Arm[name] for name in post["arms"]),
                np.array(post["alpha"], dtype=float),
                np.array(post["beta"], dtype=float),
            ),
            report=PerformanceReport.from_dict(data["report"]),
        )


def counterfactual_arm_returns(panel: ReturnPanel, period: int, weights_by_arm) -> np.ndarray:
    """Net return each arm would have earned in 1-based period ``period``."""
    if not 1 <= period <= panel.m:
        raise InsufficientDataError(f"period {period} outside 1..{panel.m}")
    row = panel.returns[period - 1]
    return np.array([per_period_return(w, row) for w in weights_by_arm])


def _weights_for(arm, prev_w, prev_ret, window, ridge_scale, n):
    # Mean-variance needs two window rows for a covariance; before that
    # (only the first two periods) it stands in as equal weight.
    if arm is Arm.MV and (window is None or window.m < 2):
        return weights_ew(n)
    return arm_weights(arm, prev_w, prev_ret, window, ridge_scale=ridge_scale)


def run_backtest(panel: ReturnPanel, config: BacktestConfig) -> BacktestResult:
    """Run one full backtest over the panel. Deterministic in (panel, config)."""
    m, n = panel.m, panel.n
    if config.tau >= m:
        raise InsufficientDataError(
            f"insufficient history: tau={config.tau} needs at least "
            f"{config.tau + 1} return periods, panel has {m}"
        )
    roster = config.arms
    rng = np.random.default_rng(config.seed)
    state = BetaState.uniform(roster)
    history = ArmReturnHistory.empty(roster)

    prev_w = weights_ew(n)  # W_0: BH and VW need a predecessor at k=1
    prev_ret = np.ones(n)  # unit gross returns stand in for the absent R_0

    selections: list[SelectionRecord] = []
    realized: list[float] = []
    trajectory: list[np.ndarray] = []
    traded_dates: list[str] = []

    for r in range(m):
        k = r + 1
        window = slice_window(panel, r, min(config.tau, r)) if r >= 1 else None
        weights_by_arm = [
            _weights_for(arm, prev_w, prev_ret, window, config.ridge_scale, n)
            for arm in roster
        ]

        thetas = sample_thetas(state, rng)
        chosen = select_arm(thetas, roster)
        idx = roster.index(chosen)

        if k > config.tau:
            w = weights_by_arm[idx]
            realized.append(per_period_return(w, panel.returns[r]))
            trajectory.append(w)
            traded_dates.append(panel.dates[r])
            prev_w = w

        history.append_period(counterfactual_arm_returns(panel, k, weights_by_arm))
        if history.n_periods > 0:
            outcome, count = evaluate_reward(history, chosen, config.c, config.sr_lookback)
            state = update_posterior(state, chosen, outcome)
            selections.append(
                SelectionRecord(k, tuple(float(t) for t in thetas), chosen, outcome, count)
            )
        prev_ret = panel.returns[r]

    realized_arr = np.array(realized)
    return BacktestResult(
        config=config,
        periodicity=panel.periodicity,
        asset_ids=panel.asset_ids,
        traded_dates=tuple(traded_dates),
        selections=selections,
        realized_net_returns=realized_arr,
        weight_trajectory=np.array(trajectory),
        cw_curve=cumulative_wealth(realized_arr),
        counterfactual=history,
        posterior=state,
        report=compute_report(realized_arr, panel.periods_per_year),
    )


@dataclass(frozen=True)
class SweepRow:
    """Metrics of one (c, seed) sweep run."""

    c: int
    seed: int
    sharpe: float
    cumulative_wealth: float
    max_drawdown_rel: float
    volatility_annualized: float

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "seed": self.seed,
            "sharpe": self.sharpe,
            "cumulative_wealth": self.cumulative_wealth,
            "max_drawdown_rel": self.max_drawdown_rel,
            "volatility_annualized": self.volatility_annualized,
        }


@dataclass(frozen=True)
class SweepSummary:
    """Across-seed mean and population std of each metric at one c."""

    c: int
    sharpe_mean: float
    sharpe_std: float
    cumulative_wealth_mean: float
    cumulative_wealth_std: float
    max_drawdown_rel_mean: float
    max_drawdown_rel_std: float
    volatility_annualized_mean: float
    volatility_annualized_std: float

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "sharpe_mean": self.sharpe_mean,
            "sharpe_std": self.sharpe_std,
            "cumulative_wealth_mean": self.cumulative_wealth_mean,
            "cumulative_wealth_std": self.cumulative_wealth_std,
            "max_drawdown_rel_mean": self.max_drawdown_rel_mean,
            "max_drawdown_rel_std": self.max_drawdown_rel_std,
            "volatility_annualized_mean": self.volatility_annualized_mean,
            "volatility_annualized_std": self.volatility_annualized_std,
        }


def run_c_sweep(
    panel: ReturnPanel,
    base: BacktestConfig,
    c_values,
    seeds,
) -> tuple[list[SweepRow], list[SweepSummary]]:
    """Run the c x seed grid and aggregate per c.

    Every run shares the base config apart from (c, seed). Summaries use
    the across-seed mean and population standard deviation.
    """
    c_values = list(c_values)
    seeds = list(seeds)
    if not c_values:
        raise ConfigError("sweep needs at least one c value")
    if not seeds:
        raise ConfigError("sweep needs at least one seed")
    if len(set(seeds)) != len(seeds):
        raise ConfigError(f"duplicate seeds in sweep: {seeds}")
    for c in c_values:
        if not 1 <= c <= len(base.arms):
            raise ConfigError(f"sweep c={c} outside 1..{len(base.arms)}")

    rows: list[SweepRow] = []
    summaries: list[SweepSummary] = []
    for c in c_values:
        block: list[SweepRow] = []
        for seed in seeds:
            result = run_backtest(panel, replace(base, c=c, seed=seed))
            rep = result.report
            block.append(
                SweepRow(
                    c=c,
                    seed=seed,
                    sharpe=rep.sharpe,
                    cumulative_wealth=rep.cumulative_wealth,
                    max_drawdown_rel=rep.max_drawdown_rel,
                    volatility_annualized=rep.volatility_annualized,
                )
            )
        rows.extend(block)
        cols = {
            name: np.array([getattr(row, name) for row in block])
            for name in ("sharpe", "cumulative_wealth", "max_drawdown_rel", "volatility_annualized")
        }
        summaries.append(
            SweepSummary(
                c=c,
                sharpe_mean=float(cols["sharpe"].mean()),
                sharpe_std=float(cols["sharpe"].std()),
                cumulative_wealth_mean=float(cols["cumulative_wealth"].mean()),
                cumulative_wealth_std=float(cols["cumulative_wealth"].std()),
                max_drawdown_rel_mean=float(cols["max_drawdown_rel"].mean()),
                max_drawdown_rel_std=float(cols["max_drawdown_rel"].std()),
                volatility_annualized_mean=float(cols["volatility_annualized"].mean()),
                volatility_annualized_std=float(cols["volatility_annualized"].std()),
            )
        )
    return rows, summaries
