"""Command line interface: run, sweep and validate subcommands.

Settings come from an optional flat key=value manifest file plus flags;
flags win. Relative paths inside a manifest resolve against the manifest's
directory, relative flag paths against the working directory.

Numbers in emitted CSVs are written with full repr precision, so they
round-trip exactly when re-read.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import plots
from .arms import DEFAULT_ROSTER, Arm, parse_roster
from .engine import BacktestConfig, run_backtest, run_c_sweep
from .errors import BanditfolioError, ConfigError
from .market_data import (
    ReturnPanel,
    filter_complete_assets,
    load_ff_returns_csv,
    load_price_panel_csv,
    prices_to_returns,
    read_percent_table,
    read_price_table,
)

_FORMATS = ("ff-returns", "prices")
_DEFAULT_PERIODICITY = {"ff-returns": "monthly", "prices": "daily"}

_MANIFEST_KEYS = {
    "data",
    "format",
    "periodicity",
    "tau",
    "c",
    "sr_lookback",
    "seed",
    "ridge_scale",
    "arms",
    "out",
    "c_list",
    "seeds",
    "n_seeds",
    "plots",
}


def parse_manifest(path) -> dict[str, str]:
    """Read a flat key = value manifest; '#' starts a comment line."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {stripped!r}")
        key, value = stripped.split("=", 1)
        key = key.strip().lower().replace("-", "_")
        if key not in _MANIFEST_KEYS:
            raise ConfigError(
                f"{path}:{lineno}: unknown manifest key {key!r}; "
                f"valid keys: {', '.join(sorted(_MANIFEST_KEYS))}"
            )
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate manifest key {key!r}")
        values[key] = value.strip()
    return values


@dataclass
class RunManifest:
    """Fully resolved settings for one CLI invocation."""

    data: Path
    format: str
    periodicity: str
    tau: int
    c: int
    sr_lookback: int
    seed: int
    ridge_scale: float
    arms: tuple[Arm, ...]
    out: Path
    plots: bool
    c_list: tuple[int, ...]
    seeds: tuple[int, ...] | None
    n_seeds: int

    def config(self) -> BacktestConfig:
        return BacktestConfig(
            tau=self.tau,
            c=self.c,
            seed=self.seed,
            sr_lookback=self.sr_lookback,
            ridge_scale=self.ridge_scale,
            arms=self.arms,
        )

    def sweep_seeds(self) -> tuple[int, ...]:
        if self.seeds is not None:
            return self.seeds
        return tuple(self.seed + i for i in range(self.n_seeds))


def _parse_int(key, text):
    try:
        return int(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be an integer, got {text!r}") from None


def _parse_float(key, text):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {text!r}") from None


def _parse_int_list(key, text):
    try:
        return tuple(int(part) for part in str(text).split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"{key} must be a comma-separated integer list, got {text!r}") from None


def _parse_bool(key, text):
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key} must be a boolean, got {text!r}")


def resolve_manifest(args) -> RunManifest:
    """Merge manifest file values with flags; flags win."""
    manifest: dict[str, str] = {}
    manifest_dir = Path.cwd()
    if getattr(args, "manifest", None):
        manifest_path = Path(args.manifest)
        manifest = parse_manifest(manifest_path)
        manifest_dir = manifest_path.resolve().parent

    def pick(key, default=None):
        flag = getattr(args, key, None)
        if flag is not None:
            return flag, "flag"
        if key in manifest:
            return manifest[key], "manifest"
        return default, "default"

    def pick_path(key, default=None):
        value, source = pick(key, default)
        if value is None:
            return None
        path = Path(value)
        if source == "manifest" and not path.is_absolute():
            path = manifest_dir / path
        return path

    data = pick_path("data")
    if data is None:
        raise ConfigError("no input data: pass --data or set 'data' in the manifest")

    fmt, _ = pick("format", "ff-returns")
    if fmt not in _FORMATS:
        raise ConfigError(f"format must be one of {_FORMATS}, got {fmt!r}")

    periodicity, _ = pick("periodicity", _DEFAULT_PERIODICITY[fmt])
    arms_raw, arms_src = pick("arms", None)
    if arms_src == "flag":
        arms = arms_raw if isinstance(arms_raw, tuple) else parse_roster(arms_raw)
    elif arms_raw is not None:
        try:
            arms = parse_roster(arms_raw)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        arms = DEFAULT_ROSTER
    if not arms:
        raise ConfigError("arm roster is empty")

    tau_raw, tau_src = pick("tau", 120)
    c_raw, c_src = pick("c", 3)
    lookback_raw, lookback_src = pick("sr_lookback", 36)
    seed_raw, seed_src = pick("seed", 0)
    ridge_raw, ridge_src = pick("ridge_scale", 1e-6)

    c_list_raw, c_list_src = pick("c_list", "1,2,3,4,5")
    seeds_raw, seeds_src = pick("seeds", None)
    n_seeds_raw, n_seeds_src = pick("n_seeds", 1)

    plots_flag = getattr(args, "no_plots", False)
    if plots_flag:
        want_plots = False
    elif "plots" in manifest:
        want_plots = _parse_bool("plots", manifest["plots"])
    else:
        want_plots = True

    return RunManifest(
        data=data,
        format=fmt,
        periodicity=str(periodicity),
        tau=tau_raw if tau_src == "flag" else _parse_int("tau", tau_raw),
        c=c_raw if c_src == "flag" else _parse_int("c", c_raw),
        sr_lookback=lookback_raw if lookback_src == "flag" else _parse_int("sr_lookback", lookback_raw),
        seed=seed_raw if seed_src == "flag" else _parse_int("seed", seed_raw),
        ridge_scale=ridge_raw if ridge_src == "flag" else _parse_float("ridge_scale", ridge_raw),
        arms=tuple(arms),
        out=pick_path("out", "results"),
        plots=want_plots,
        c_list=c_list_raw if c_list_src == "flag" else _parse_int_list("c_list", c_list_raw),
        seeds=seeds_raw if seeds_src == "flag" else (
            _parse_int_list("seeds", seeds_raw) if seeds_raw is not None else None
        ),
        n_seeds=n_seeds_raw if n_seeds_src == "flag" else _parse_int("n_seeds", n_seeds_raw),
    )


def load_panel(manifest: RunManifest) -> ReturnPanel:
    if manifest.format == "ff-returns":
        return load_ff_returns_csv(manifest.data, manifest.periodicity)
    prices = load_price_panel_csv(manifest.data)
    return prices_to_returns(prices, manifest.periodicity)


def _fmt(value) -> str:
    return repr(float(value))


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_result_json(path, result) -> None:
    payload = json.dumps(result.to_dict(), indent=2, sort_keys=True)
    Path(path).write_text(payload + "\n", encoding="utf-8")


def cmd_run(manifest: RunManifest) -> int:
    panel = load_panel(manifest)
    result = run_backtest(panel, manifest.config())
    out = manifest.out
    out.mkdir(parents=True, exist_ok=True)

    _write_result_json(out / "result.json", result)

    rep = result.report
    _write_csv(
        out / "metrics.csv",
        ["sr", "sr_x100", "cw", "mdd_abs", "mdd_rel", "vo"],
        [[
            _fmt(rep.sharpe),
            _fmt(rep.sharpe_x100),
            _fmt(rep.cumulative_wealth),
            _fmt(rep.max_drawdown_abs),
            _fmt(rep.max_drawdown_rel),
            _fmt(rep.volatility_annualized),
        ]],
    )

    first_traded = panel.m - len(result.cw_curve) + 1
    _write_csv(
        out / "cw_curve.csv",
        ["period", "date", "cw"],
        [
            [first_traded + i, date, _fmt(v)]
            for i, (date, v) in enumerate(zip(result.traded_dates, result.cw_curve))
        ],
    )

    theta_cols = [f"theta_{arm.name}" for arm in result.config.arms]
    _write_csv(
        out / "selections.csv",
        ["period", "arm", *theta_cols, "success_count", "outcome"],
        [
            [s.period, s.chosen.name, *[_fmt(t) for t in s.sampled_thetas], s.success_count, s.outcome]
            for s in result.selections
        ],
    )

    written = ["result.json", "metrics.csv", "cw_curve.csv", "selections.csv"]
    if manifest.plots:
        plots.save_cw_figure(result.traded_dates, result.cw_curve, out / "cw_curve.png")
        written.append("cw_curve.png")

    print(f"run complete: {len(result.cw_curve)} traded periods, seed {manifest.seed}")
    print(
        f"sr={rep.sharpe:.6f} cw={rep.cumulative_wealth:.6f} "
        f"mdd_rel={rep.max_drawdown_rel:.6f} vo={rep.volatility_annualized:.6f}"
    )
    print(f"wrote {', '.join(written)} to {out}")
    return 0


def cmd_sweep(manifest: RunManifest) -> int:
    panel = load_panel(manifest)
    seeds = manifest.sweep_seeds()
    rows, summaries = run_c_sweep(panel, manifest.config(), manifest.c_list, seeds)
    out = manifest.out
    out.mkdir(parents=True, exist_ok=True)

    _write_csv(
        out / "sweep.csv",
        ["c", "seed", "sr", "cw", "mdd_rel", "vo"],
        [
            [r.c, r.seed, _fmt(r.sharpe), _fmt(r.cumulative_wealth),
             _fmt(r.max_drawdown_rel), _fmt(r.volatility_annualized)]
            for r in rows
        ],
    )
    _write_csv(
        out / "sweep_summary.csv",
        [
            "c",
            "sr_mean", "sr_std",
            "cw_mean", "cw_std",
            "mdd_rel_mean", "mdd_rel_std",
            "vo_mean", "vo_std",
        ],
        [
            [s.c,
             _fmt(s.sharpe_mean), _fmt(s.sharpe_std),
             _fmt(s.cumulative_wealth_mean), _fmt(s.cumulative_wealth_std),
             _fmt(s.max_drawdown_rel_mean), _fmt(s.max_drawdown_rel_std),
             _fmt(s.volatility_annualized_mean), _fmt(s.volatility_annualized_std)]
            for s in summaries
        ],
    )

    written = ["sweep.csv", "sweep_summary.csv"]
    if manifest.plots:
        plots.save_sweep_figure(summaries, out / "sweep.png")
        written.append("sweep.png")

    print(f"sweep complete: {len(rows)} runs ({len(manifest.c_list)} c values x {len(seeds)} seeds)")
    for s in summaries:
        print(
            f"c={s.c}: sr_mean={s.sharpe_mean:.6f} cw_mean={s.cumulative_wealth_mean:.6f} "
            f"vo_mean={s.volatility_annualized_mean:.6f}"
        )
    print(f"wrote {', '.join(written)} to {out}")
    return 0


def cmd_validate(args) -> int:
    if args.data is None:
        raise ConfigError("no input data: pass --data")
    fmt = args.format or "ff-returns"
    if fmt not in _FORMATS:
        raise ConfigError(f"format must be one of {_FORMATS}, got {fmt!r}")
    if fmt == "ff-returns":
        table = read_percent_table(args.data)
    else:
        table = read_price_table(args.data)
    clean, dropped = filter_complete_assets(table)
    print(f"file: {args.data}")
    print(f"format: {fmt}")
    print(f"periods: {table.n_rows} ({table.dates[0]} .. {table.dates[-1]})")
    print(f"kept {clean.n_assets} of {table.n_assets} assets")
    if dropped:
        print(f"dropped (incomplete): {', '.join(dropped)}")
    if fmt == "prices":
        print(f"return periods after conversion: {table.n_rows - 1}")
    return 0


def _add_common_flags(parser, sweep=False):
    parser.add_argument("--manifest", help="path to a flat key = value manifest file")
    parser.add_argument("--data", help="input CSV path")
    parser.add_argument("--format", choices=_FORMATS, help="input layout (default ff-returns)")
    parser.add_argument(
        "--periodicity",
        choices=("monthly", "daily"),
        help="period length; defaults to monthly for ff-returns, daily for prices",
    )
    parser.add_argument("--tau", type=int, help="warm-up / trailing window length (default 120)")
    parser.add_argument("--c", type=int, help="success threshold in 1..#arms (default 3)")
    parser.add_argument("--sr-lookback", dest="sr_lookback", type=int,
                        help="sharpe lookback for reward evaluation (default 36)")
    parser.add_argument("--seed", type=int, help="RNG seed (default 0)")
    parser.add_argument("--ridge-scale", dest="ridge_scale", type=float,
                        help="covariance ridge scale (default 1e-6)")
    parser.add_argument("--arms", type=parse_roster,
                        help="comma-separated arm roster, e.g. BH,SA,EW,VW,MV")
    parser.add_argument("--out", help="output directory (default results)")
    parser.add_argument("--no-plots", action="store_true", help="skip PNG figure output")
    if sweep:
        parser.add_argument("--c-list", dest="c_list", type=lambda t: _parse_int_list("c_list", t),
                            help="c values to sweep, e.g. 1,3,5 (default 1,2,3,4,5)")
        parser.add_argument("--seeds", type=lambda t: _parse_int_list("seeds", t),
                            help="explicit seed list, e.g. 0,1,2")
        parser.add_argument("--n-seeds", dest="n_seeds", type=int,
                            help="without --seeds, run seeds seed+0..seed+n-1 (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banditfolio",
        description="Thompson-sampling strategy switching over classic portfolio rules.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one backtest and write reports")
    _add_common_flags(p_run)

    p_sweep = sub.add_parser("sweep", help="run a c x seed grid and write sweep tables")
    _add_common_flags(p_sweep, sweep=True)

    p_val = sub.add_parser("validate", help="parse a data file and report panel shape")
    p_val.add_argument("--data", required=True, help="input CSV path")
    p_val.add_argument("--format", choices=_FORMATS, help="input layout (default ff-returns)")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(resolve_manifest(args))
        if args.command == "sweep":
            return cmd_sweep(resolve_manifest(args))
        if args.command == "validate":
            return cmd_validate(args)
        parser.error(f"unknown command {args.command!r}")
    except BanditfolioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
