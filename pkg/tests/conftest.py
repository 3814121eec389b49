"""Shared helpers for the test suite."""

from pathlib import Path

import numpy as np

from banditfolio import (
    FAILURE,
    SUCCESS,
    BetaState,
    ReturnPanel,
    sample_thetas,
    select_arm,
    update_posterior,
)
from banditfolio.arms import DEFAULT_ROSTER

DATA_DIR = Path(__file__).parent / "data"
FIXTURE_CSV = DATA_DIR / "two_asset_returns.csv"


def date_labels(m, start=0):
    return [f"p{start + i:04d}" for i in range(m)]


def make_panel(returns, periodicity="monthly", dates=None, asset_ids=None):
    """Build a ReturnPanel from a plain array of gross returns."""
    arr = np.atleast_2d(np.asarray(returns, dtype=float))
    m, n = arr.shape
    if dates is None:
        dates = date_labels(m)
    if asset_ids is None:
        asset_ids = [f"A{j}" for j in range(n)]
    return ReturnPanel(tuple(dates), arr, tuple(asset_ids), periodicity)


def random_gross_panel(rng, m, n, mean=0.005, vol=0.03, periodicity="monthly"):
    """Random positive gross-return panel for property sweeps."""
    net = rng.normal(mean, vol, size=(m, n))
    gross = np.clip(1.0 + net, 0.05, None)
    return make_panel(gross, periodicity=periodicity)


def thompson_bernoulli_run(probs, rounds, seed):
    """Plain Thompson loop against fixed Bernoulli success probabilities.

    Returns the chosen arm positions and the final posterior. Uses the
    library's sampling/selection/update ops end to end.
    """
    arms = DEFAULT_ROSTER[: len(probs)]
    probs = np.asarray(probs, dtype=float)
    state = BetaState.uniform(arms)
    rng = np.random.default_rng(seed)
    chosen_positions = []
    for _ in range(rounds):
        thetas = sample_thetas(state, rng)
        arm = select_arm(thetas, arms)
        idx = arms.index(arm)
        outcome = SUCCESS if rng.random() < probs[idx] else FAILURE
        state = update_posterior(state, arm, outcome)
        chosen_positions.append(idx)
    return chosen_positions, state
