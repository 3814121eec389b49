"""Figure rendering for run and sweep reports.

Every figure lands next to the delimited output as a PNG. Rendering uses
the Agg backend so it works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _date_ticks(ax, dates, max_ticks=6):
    if not dates:
        return
    step = max(1, len(dates) // max_ticks)
    positions = list(range(0, len(dates), step))
    ax.set_xticks(positions)
    ax.set_xticklabels([dates[i] for i in positions], rotation=30, ha="right")


def save_cw_figure(dates, cw, path, title="Cumulative wealth") -> None:
    """Line chart of the cumulative wealth trajectory over traded periods."""
    fig, ax = plt.subplots(figsize=(9, 4.5))
    ax.plot(range(len(cw)), cw, color="#1f6f8b", linewidth=1.6)
    ax.axhline(1.0, color="#999999", linewidth=0.8, linestyle="--")
    ax.set_title(title)
    ax.set_xlabel("period")
    ax.set_ylabel("wealth multiple")
    ax.grid(alpha=0.3)
    _date_ticks(ax, list(dates))
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def save_sweep_figure(summaries, path) -> None:
    """Mean terminal wealth and mean annualized volatility against c."""
    cs = [s.c for s in summaries]
    cw_mean = [s.cumulative_wealth_mean for s in summaries]
    cw_std = [s.cumulative_wealth_std for s in summaries]
    vo_mean = [s.volatility_annualized_mean for s in summaries]
    vo_std = [s.volatility_annualized_std for s in summaries]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.errorbar(cs, cw_mean, yerr=cw_std, marker="o", color="#1f6f8b", capsize=3)
    ax1.set_title("terminal wealth vs c")
    ax1.set_xlabel("success threshold c")
    ax1.set_ylabel("mean terminal wealth")
    ax1.grid(alpha=0.3)
    ax2.errorbar(cs, vo_mean, yerr=vo_std, marker="o", color="#b05f2c", capsize=3)
    ax2.set_title("annualized volatility vs c")
    ax2.set_xlabel("success threshold c")
    ax2.set_ylabel("mean annualized volatility")
    ax2.grid(alpha=0.3)
    for ax in (ax1, ax2):
        ax.set_xticks(cs)
    fig.tight_layout()
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
