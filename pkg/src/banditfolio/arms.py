"""The five strategy arms and the moment machinery behind the mean-variance arm.

Arms map market state to a weight vector. A valid weight vector either sums
to 1 (fully invested, shorts allowed) or is identically zero (all cash).
The arm order is fixed: BH=1, SA=2, EW=3, VW=4, MV=5.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import InsufficientDataError, SingularCovarianceError
from .market_data import ReturnPanel

# Denominator below this is treated as degenerate by the value-weighted arm.
VW_DENOM_FLOOR = 1e-12

KKT_GRADIENT_TOL = 1e-8
KKT_BUDGET_TOL = 1e-10


class Arm(IntEnum):
    """Strategy arm identifiers; integer values fix the canonical order."""

    BH = 1  # buy and hold: keep the previous weights
    SA = 2  # stand aside: all cash
    EW = 3  # equal weight
    VW = 4  # value weighted: previous weights drifted by the last returns
    MV = 5  # mean-variance optimal over a trailing window


DEFAULT_ROSTER = (Arm.BH, Arm.SA, Arm.EW, Arm.VW, Arm.MV)


def parse_roster(text: str) -> tuple[Arm, ...]:
    """Parse a comma-separated arm list like 'BH,EW,MV'."""
    arms = []
    for tag in text.split(","):
        tag = tag.strip().upper()
        if not tag:
            continue
        try:
            arms.append(Arm[tag])
        except KeyError:
            valid = ",".join(a.name for a in DEFAULT_ROSTER)
            raise ValueError(f"unknown arm {tag!r}; valid arms: {valid}") from None
    return tuple(arms)


def validate_weights(w: np.ndarray, atol: float = 1e-9) -> None:
    """Raise ValueError unless w sums to 1 within atol or is exactly zero."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a nonempty 1-d vector")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights contain non-finite entries")
    if np.all(w == 0.0):
        return
    if abs(float(w.sum()) - 1.0) > atol:
        raise ValueError(f"weights sum to {w.sum()!r}, expected 1 within {atol}")


def weights_bh(prev: np.ndarray) -> np.ndarray:
    """Buy and hold: the previous weight vector, unchanged."""
    return np.array(prev, dtype=float)


def weights_sa(n: int) -> np.ndarray:
    """Stand aside: hold cash, zero weight everywhere."""
    if n < 1:
        raise ValueError("need at least one asset")
    return np.zeros(n)


def weights_ew(n: int) -> np.ndarray:
    """Equal weight: 1/n in every asset."""
    if n < 1:
        raise ValueError("need at least one asset")
    return np.full(n, 1.0 / n)


def weights_vw(prev: np.ndarray, prev_returns: np.ndarray) -> np.ndarray:
    """Value weighted: previous weights drifted by the latest gross returns.

    Computes (prev * prev_returns) / (prev . prev_returns). When the
    denominator is within 1e-12 of zero (all-cash predecessor, or shorts
    exactly cancelling longs) the arm falls back to equal weight.
    """
    prev = np.asarray(prev, dtype=float)
    prev_returns = np.asarray(prev_returns, dtype=float)
    if prev.shape != prev_returns.shape:
        raise ValueError(
            f"weights and returns disagree in length: {prev.shape} vs {prev_returns.shape}"
        )
    denom = float(prev @ prev_returns)
    if abs(denom) <= VW_DENOM_FLOOR:
        return weights_ew(prev.size)
    return prev * prev_returns / denom


@dataclass(frozen=True)
class MomentEstimate:
    """Sample moments of a return window plus the ridge used to regularize."""

    mean: np.ndarray
    cov: np.ndarray
    ridge: float

    @property
    def n(self) -> int:
        return self.mean.size

    def regularized_cov(self) -> np.ndarray:
        return self.cov + self.ridge * np.eye(self.n)


def estimate_moments(window: ReturnPanel, ridge_scale: float = 1e-6) -> MomentEstimate:
    """Column sample mean and sample covariance (denominator rows-1) of a window.

    The ridge added to the diagonal is ridge_scale * trace(cov)/n, falling
    back to ridge_scale itself when the window has zero variance, so the
    regularized covariance is always positive definite. A constant window
    can leave a vanishing positive trace (squared rounding error of the
    column means); anything below the data's squared float precision counts
    as zero variance, not as signal to scale the ridge by.
    """
    rows = window.returns
    if rows.shape[0] < 2:
        raise InsufficientDataError(
            f"moment estimation needs at least 2 rows, got {rows.shape[0]}"
        )
    if ridge_scale < 0.0:
        raise ValueError("ridge_scale must be non-negative")
    mean = rows.mean(axis=0)
    cov = np.atleast_2d(np.cov(rows, rowvar=False, ddof=1))
    cov = 0.5 * (cov + cov.T)
    base = float(np.trace(cov)) / window.n
    noise_floor = (1e-12 * max(1.0, float(np.abs(mean).max()))) ** 2
    ridge = ridge_scale * base if base > noise_floor else ridge_scale
    return MomentEstimate(mean=mean, cov=cov, ridge=ridge)


def solve_mv_qp(moments: MomentEstimate) -> np.ndarray:
    """Minimize w' S w - r' w subject to sum(w) = 1, shorts permitted.

    S is the ridge-regularized covariance and r the mean gross return.
    Solved in closed form via the single budget constraint: with B = 2S,
    x = B^-1 r, y = B^-1 1 and lam = (sum(x) - 1)/sum(y), the optimum is
    w = x - lam * y. A couple of refinement passes on the bordered system
    keep the KKT residuals at solver precision even for ill-conditioned S.
    """
    r = np.asarray(moments.mean, dtype=float)
    b = 2.0 * moments.regularized_cov()
    n = r.size
    ones = np.ones(n)
    try:
        factor = cho_factor(b)
        x = cho_solve(factor, r)
        y = cho_solve(factor, ones)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularCovarianceError(
            f"covariance factorization failed: {exc}"
        ) from exc

    denom = float(ones @ y)
    if denom <= 0.0 or not np.isfinite(denom):
        raise SingularCovarianceError("degenerate covariance: 1' S^-1 1 not positive")
    lam = (float(ones @ x) - 1.0) / denom
    w = x - lam * y

    # Iterative refinement of [B 1; 1' 0][w; lam] = [r; 1].
    for _ in range(3):
        grad_res = r - (b @ w + lam)
        budget_res = 1.0 - float(w.sum())
        if np.abs(grad_res).max() < 1e-14 and abs(budget_res) < 1e-14:
            break
        dx = cho_solve(factor, grad_res)
        dlam = (float(dx.sum()) - budget_res) / denom
        w = w + (dx - dlam * y)
        lam = lam + dlam

    # Spread any leftover budget residual evenly across the book. The
    # gradient moves by at most |B . 1| * residual / n, far below its
    # tolerance, while the budget lands at the rounding floor.
    for _ in range(2):
        w = w - (float(w.sum()) - 1.0) / n

    # A long-short book of gross size L cannot certify its sum closer than
    # summation rounding, about L * 1e-16, so the budget check is relative
    # to the book size while staying absolute for ordinary solutions.
    grad_inf = float(np.abs(b @ w + lam - r).max())
    budget = abs(float(w.sum()) - 1.0)
    book = max(1.0, float(np.abs(w).sum()))
    if grad_inf >= KKT_GRADIENT_TOL or budget >= KKT_BUDGET_TOL * book:
        raise SingularCovarianceError(
            f"optimizer residuals too large (gradient {grad_inf:.3e}, budget {budget:.3e}); "
            "covariance is too ill-conditioned"
        )
    return w


def arm_weights(
    arm: Arm,
    prev: np.ndarray,
    prev_returns: np.ndarray,
    window: ReturnPanel | None,
    ridge_scale: float = 1e-6,
) -> np.ndarray:
    """Compute one arm's weights for the coming period.

    ``prev`` is the current portfolio, ``prev_returns`` the latest observed
    gross-return row, ``window`` the trailing return window used by the
    mean-variance arm. Errors from the dispatched arm propagate.
    """
    prev = np.asarray(prev, dtype=float)
    if arm is Arm.BH:
        return weights_bh(prev)
    if arm is Arm.SA:
        return weights_sa(prev.size)
    if arm is Arm.EW:
        return weights_ew(prev.size)
    if arm is Arm.VW:
        return weights_vw(prev, prev_returns)
    if arm is Arm.MV:
        if window is None:
            raise InsufficientDataError("mean-variance arm needs a return window")
        return solve_mv_qp(estimate_moments(window, ridge_scale))
    raise ValueError(f"unknown arm {arm!r}")
