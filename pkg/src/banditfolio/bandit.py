"""Beta-Bernoulli Thompson sampling over strategy arms.

Each arm carries a Beta(alpha, beta) posterior over its success
probability, starting uniform at Beta(1, 1). One round samples a theta
per arm, plays the argmax, judges the play against the trailing Sharpe
ratios of every arm's counterfactual return history, and moves one unit
of mass to alpha on success or beta on failure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arms import DEFAULT_ROSTER, Arm
from .errors import ConfigError, InsufficientDataError
from .metrics import VARIANCE_FLOOR

SUCCESS = "success"
FAILURE = "failure"


@dataclass(frozen=True)
class BetaState:
    """Per-arm Beta posterior parameters, aligned with ``arms``."""

    arms: tuple[Arm, ...]
    alphas: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        alphas = np.array(self.alphas, dtype=float)
        betas = np.array(self.betas, dtype=float)
        arms = tuple(self.arms)
        if len(arms) == 0:
            raise ConfigError("posterior needs at least one arm")
        if len(set(arms)) != len(arms):
            raise ConfigError("duplicate arms in posterior")
        if alphas.shape != (len(arms),) or betas.shape != (len(arms),):
            raise ConfigError("alpha/beta vectors must have one entry per arm")
        if np.any(alphas < 1.0) or np.any(betas < 1.0):
            raise ConfigError("Beta parameters must be >= 1")
        alphas.setflags(write=False)
        betas.setflags(write=False)
        object.__setattr__(self, "arms", arms)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)

    @classmethod
    def uniform(cls, arms: tuple[Arm, ...] = DEFAULT_ROSTER) -> "BetaState":
        n = len(arms)
        return cls(tuple(arms), np.ones(n), np.ones(n))

    @property
    def n_arms(self) -> int:
        return len(self.arms)

    def completed_rounds(self) -> int:
        """Number of posterior updates absorbed since the uniform prior."""
        return int(round(float((self.alphas - 1.0).sum() + (self.betas - 1.0).sum())))


@dataclass
class ArmReturnHistory:
    """Counterfactual net-return history per arm, equal length across arms."""

    arms: tuple[Arm, ...]
    returns: list[list[float]]

    @classmethod
    def empty(cls, arms: tuple[Arm, ...]) -> "ArmReturnHistory":
        return cls(tuple(arms), [[] for _ in arms])

    @property
    def n_periods(self) -> int:
        return len(self.returns[0]) if self.returns else 0

    def append_period(self, values) -> None:
        values = [float(v) for v in values]
        if len(values) != len(self.arms):
            raise ValueError(
                f"expected {len(self.arms)} returns, got {len(values)}"
            )
        for series, v in zip(self.returns, values):
            series.append(v)


@dataclass(frozen=True)
class SelectionRecord:
    """One bandit round: what was sampled, played, and how it was judged."""

    period: int
    sampled_thetas: tuple[float, ...]
    chosen: Arm
    outcome: str
    success_count: int

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "thetas": list(self.sampled_thetas),
            "arm": self.chosen.name,
            "outcome": self.outcome,
            "success_count": self.success_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SelectionRecord":
        return cls(
            period=int(data["period"]),
            sampled_thetas=tuple(float(t) for t in data["thetas"]),
            chosen=Arm[data["arm"]],
            outcome=str(data["outcome"]),
            success_count=int(data["success_count"]),
        )


def sample_thetas(state: BetaState, rng: np.random.Generator) -> np.ndarray:
    """Draw one independent Beta(alpha_j, beta_j) sample per arm."""
    return rng.beta(state.alphas, state.betas)


def select_arm(thetas, arms: tuple[Arm, ...] = DEFAULT_ROSTER) -> Arm:
    """Arm with the largest sampled theta; ties go to the lowest position."""
    thetas = np.asarray(thetas, dtype=float)
    if thetas.shape != (len(arms),):
        raise ValueError(f"expected {len(arms)} thetas, got shape {thetas.shape}")
    return arms[int(np.argmax(thetas))]


def _trailing_sharpe(series: list[float], lookback: int) -> float:
    tail = np.asarray(series[-lookback:], dtype=float)
    mu = float(tail.mean())
    sd = float(tail.std())
    return mu / (sd + VARIANCE_FLOOR)


def evaluate_reward(
    history: ArmReturnHistory,
    chosen: Arm,
    c: int,
    sr_lookback: int = 36,
) -> tuple[str, int]:
    """Judge a play: how many arms does the chosen arm's Sharpe weakly beat?

    Sharpe ratios are computed over the trailing min(sr_lookback, available)
    periods of each arm's counterfactual history. The comparison is weak
    (>= 0) and includes the chosen arm itself, so the success count is at
    least 1 and c=1 always succeeds. Success means count >= c.
    """
    n_arms = len(history.arms)
    if not 1 <= c <= n_arms:
        raise ConfigError(f"success threshold c={c} outside 1..{n_arms}")
    if sr_lookback < 1:
        raise ConfigError(f"sr_lookback must be >= 1, got {sr_lookback}")
    if history.n_periods == 0:
        raise InsufficientDataError("reward needs at least one recorded return per arm")
    if chosen not in history.arms:
        raise ConfigError(f"chosen arm {chosen.name} not in roster")
    scores = [_trailing_sharpe(series, sr_lookback) for series in history.returns]
    chosen_score = scores[history.arms.index(chosen)]
    count = sum(1 for s in scores if chosen_score - s >= 0.0)
    outcome = SUCCESS if count >= c else FAILURE
    return outcome, count


def update_posterior(state: BetaState, chosen: Arm, outcome: str) -> BetaState:
    """Move one unit of mass to the chosen arm's alpha (success) or beta."""
    if outcome not in (SUCCESS, FAILURE):
        raise ConfigError(f"outcome must be {SUCCESS!r} or {FAILURE!r}, got {outcome!r}")
    if chosen not in state.arms:
        raise ConfigError(f"chosen arm {chosen.name} not in roster")
    idx = state.arms.index(chosen)
    alphas = np.array(state.alphas)
    betas = np.array(state.betas)
    if outcome == SUCCESS:
        alphas[idx] += 1.0
    else:
        betas[idx] += 1.0
    return BetaState(state.arms, alphas, betas)
