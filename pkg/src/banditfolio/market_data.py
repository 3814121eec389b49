"""CSV ingestion and windowing for return and price panels.

Two input layouts are supported: wide percent-return tables (one column per
asset, values in percent, with the conventional <= -99.0 missing sentinel)
and price tables, either wide (date, price_1, ..., price_n) or long
(date, asset, price). Panels are immutable once built; assets with any
missing observation are dropped before construction, so a finished panel
is always dense, finite and strictly positive.

Dates are opaque ordered labels. Loaders sort rows lexicographically by
label and reject duplicates, so labels must sort chronologically
(ISO-style strings do).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, PanelFormatError, WindowBoundsError

PERIODS_PER_YEAR = {"monthly": 12, "daily": 365}

# Percent values at or below this are treated as a missing-data sentinel,
# matching the convention of wide percent-return research files.
MISSING_SENTINEL = -99.0

_ASSET_COLUMN_NAMES = {"asset", "ticker", "symbol", "id"}


@dataclass
class RawTable:
    """Parsed CSV contents before completeness filtering.

    ``values[r, c]`` is undefined (NaN) wherever ``missing[r, c]`` is True.
    """

    dates: list[str]
    asset_ids: list[str]
    values: np.ndarray
    missing: np.ndarray

    @property
    def n_rows(self) -> int:
        return len(self.dates)

    @property
    def n_assets(self) -> int:
        return len(self.asset_ids)


@dataclass(frozen=True)
class PricePanel:
    """Dense panel of strictly positive prices, one row per date."""

    dates: tuple[str, ...]
    prices: np.ndarray
    asset_ids: tuple[str, ...]

    def __post_init__(self):
        prices = np.array(self.prices, dtype=float)
        dates = tuple(self.dates)
        asset_ids = tuple(self.asset_ids)
        _check_panel_shape(prices, dates, asset_ids, "price")
        if not np.all(np.isfinite(prices)):
            raise PanelFormatError("price panel contains non-finite values")
        if not np.all(prices > 0.0):
            raise PanelFormatError("price panel contains non-positive values")
        prices.setflags(write=False)
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "asset_ids", asset_ids)

    @property
    def m(self) -> int:
        return self.prices.shape[0]

    @property
    def n(self) -> int:
        return self.prices.shape[1]


@dataclass(frozen=True)
class ReturnPanel:
    """Dense panel of gross returns (price relatives), one row per period.

    Gross returns are strictly positive: 1.02 means +2% for the period.
    ``periodicity`` fixes the annualization factor, 12 periods per year
    for monthly data and 365 for daily.
    """

    dates: tuple[str, ...]
    returns: np.ndarray
    asset_ids: tuple[str, ...]
    periodicity: str

    def __post_init__(self):
        returns = np.array(self.returns, dtype=float)
        dates = tuple(self.dates)
        asset_ids = tuple(self.asset_ids)
        _check_panel_shape(returns, dates, asset_ids, "return")
        if self.periodicity not in PERIODS_PER_YEAR:
            raise PanelFormatError(
                f"unknown periodicity {self.periodicity!r}; "
                f"expected one of {sorted(PERIODS_PER_YEAR)}"
            )
        if not np.all(np.isfinite(returns)):
            raise PanelFormatError("return panel contains non-finite values")
        if not np.all(returns > 0.0):
            raise PanelFormatError("return panel contains non-positive gross returns")
        returns.setflags(write=False)
        object.__setattr__(self, "returns", returns)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "asset_ids", asset_ids)

    @property
    def m(self) -> int:
        return self.returns.shape[0]

    @property
    def n(self) -> int:
        return self.returns.shape[1]

    @property
    def periods_per_year(self) -> int:
        return PERIODS_PER_YEAR[self.periodicity]


def _check_panel_shape(values, dates, asset_ids, kind):
    if values.ndim != 2:
        raise PanelFormatError(f"{kind} panel must be 2-dimensional")
    m, n = values.shape
    if m < 1 or n < 1:
        raise PanelFormatError(f"{kind} panel must have at least one row and one asset")
    if len(dates) != m:
        raise PanelFormatError(f"{kind} panel has {m} rows but {len(dates)} dates")
    if len(asset_ids) != n:
        raise PanelFormatError(f"{kind} panel has {n} columns but {len(asset_ids)} asset ids")
    if len(set(asset_ids)) != n:
        raise PanelFormatError(f"{kind} panel has duplicate asset ids")
    for i in range(m - 1):
        if not dates[i] < dates[i + 1]:
            raise PanelFormatError(
                f"{kind} panel dates not strictly increasing at {dates[i]!r} -> {dates[i + 1]!r}"
            )


def _read_rows(path) -> list[list[str]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise PanelFormatError(f"cannot read {path}: {exc}") from exc
    rows = [row for row in rows if any(cell.strip() for cell in row)]
    if not rows:
        raise PanelFormatError(f"{path}: file is empty")
    return rows


def _parse_header(path, rows) -> list[str]:
    header = [cell.strip() for cell in rows[0]]
    if len(header) < 2:
        raise PanelFormatError(
            f"{path}: header must name a date column and at least one value column"
        )
    return header


def _sort_by_date(path, dates, values, missing):
    order = sorted(range(len(dates)), key=lambda i: dates[i])
    dates = [dates[i] for i in order]
    for i in range(len(dates) - 1):
        if dates[i] == dates[i + 1]:
            raise PanelFormatError(f"{path}: duplicate date {dates[i]!r}")
    return dates, values[order], missing[order]


def read_percent_table(path) -> RawTable:
    """Parse a wide percent-value CSV into a :class:`RawTable`.

    Cells at or below the -99.0 sentinel are flagged missing. Any other
    cell must parse as a finite number; empty or malformed cells raise
    :class:`PanelFormatError` naming the row and column.
    """
    rows = _read_rows(path)
    header = _parse_header(path, rows)
    asset_ids = header[1:]
    if len(set(asset_ids)) != len(asset_ids):
        raise PanelFormatError(f"{path}: duplicate asset columns in header")

    dates: list[str] = []
    values = np.full((len(rows) - 1, len(asset_ids)), np.nan)
    missing = np.zeros_like(values, dtype=bool)
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise PanelFormatError(
                f"{path}: row {r} has {len(row)} cells, expected {len(header)}"
            )
        dates.append(row[0].strip())
        for c, cell in enumerate(row[1:]):
            text = cell.strip()
            try:
                v = float(text)
            except ValueError:
                raise PanelFormatError(
                    f"{path}: row {r}, column {c + 2} (asset {asset_ids[c]!r}): "
                    f"cannot parse {text!r} as a number"
                ) from None
            if not math.isfinite(v):
                raise PanelFormatError(
                    f"{path}: row {r}, column {c + 2} (asset {asset_ids[c]!r}): "
                    f"non-finite value {text!r}"
                )
            if v <= MISSING_SENTINEL:
                missing[r - 2, c] = True
            else:
                values[r - 2, c] = v

    dates, values, missing = _sort_by_date(path, dates, values, missing)
    return RawTable(dates, list(asset_ids), values, missing)


def read_price_table(path) -> RawTable:
    """Parse a price CSV, wide or long, into a :class:`RawTable`.

    Long layout is detected by a 3-column header whose middle column is
    named asset/ticker/symbol/id; everything else is treated as wide.
    Empty cells (wide) and absent date/asset pairs (long) are missing.
    A non-positive price is an error, not a missing value.
    """
    rows = _read_rows(path)
    header = _parse_header(path, rows)
    if len(header) == 3 and header[1].lower() in _ASSET_COLUMN_NAMES:
        return _read_long_prices(path, rows, header)
    return _read_wide_prices(path, rows, header)


def _parse_price(path, r, label, text):
    try:
        v = float(text)
    except ValueError:
        raise PanelFormatError(
            f"{path}: row {r} ({label}): cannot parse {text!r} as a price"
        ) from None
    if not math.isfinite(v):
        raise PanelFormatError(f"{path}: row {r} ({label}): non-finite price {text!r}")
    if v <= 0.0:
        raise PanelFormatError(f"{path}: row {r} ({label}): non-positive price {v}")
    return v


def _read_wide_prices(path, rows, header) -> RawTable:
    asset_ids = header[1:]
    if len(set(asset_ids)) != len(asset_ids):
        raise PanelFormatError(f"{path}: duplicate asset columns in header")
    dates: list[str] = []
    values = np.full((len(rows) - 1, len(asset_ids)), np.nan)
    missing = np.zeros_like(values, dtype=bool)
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise PanelFormatError(
                f"{path}: row {r} has {len(row)} cells, expected {len(header)}"
            )
        date = row[0].strip()
        dates.append(date)
        for c, cell in enumerate(row[1:]):
            text = cell.strip()
            if not text:
                missing[r - 2, c] = True
                continue
            label = f"asset {asset_ids[c]!r} at {date!r}"
            values[r - 2, c] = _parse_price(path, r, label, text)

    dates, values, missing = _sort_by_date(path, dates, values, missing)
    return RawTable(dates, list(asset_ids), values, missing)


def _read_long_prices(path, rows, header) -> RawTable:
    entries: dict[tuple[str, str], float] = {}
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise PanelFormatError(f"{path}: row {r} has {len(row)} cells, expected 3")
        date, asset, text = (cell.strip() for cell in row)
        if not date or not asset:
            raise PanelFormatError(f"{path}: row {r}: empty date or asset label")
        if (date, asset) in entries:
            raise PanelFormatError(
                f"{path}: row {r}: duplicate observation for asset {asset!r} at {date!r}"
            )
        label = f"asset {asset!r} at {date!r}"
        entries[(date, asset)] = _parse_price(path, r, label, text)

    dates = sorted({date for date, _ in entries})
    asset_ids = sorted({asset for _, asset in entries})
    values = np.full((len(dates), len(asset_ids)), np.nan)
    missing = np.ones_like(values, dtype=bool)
    date_pos = {d: i for i, d in enumerate(dates)}
    asset_pos = {a: j for j, a in enumerate(asset_ids)}
    for (date, asset), price in entries.items():
        values[date_pos[date], asset_pos[asset]] = price
        missing[date_pos[date], asset_pos[asset]] = False
    return RawTable(dates, asset_ids, values, missing)


def filter_complete_assets(table: RawTable) -> tuple[RawTable, list[str]]:
    """Drop every asset with at least one missing observation.

    Returns the filtered table and the list of dropped asset ids. Raises
    :class:`PanelFormatError` if no complete asset remains.
    """
    keep = ~table.missing.any(axis=0)
    dropped = [a for a, k in zip(table.asset_ids, keep) if not k]
    if not keep.any():
        raise PanelFormatError("no asset has a complete history; nothing to keep")
    kept = RawTable(
        list(table.dates),
        [a for a, k in zip(table.asset_ids, keep) if k],
        table.values[:, keep],
        table.missing[:, keep],
    )
    return kept, dropped


def load_ff_returns_csv(path, periodicity: str) -> ReturnPanel:
    """Load a wide percent-return CSV as a gross-return panel.

    Percent values become gross returns via 1 + v/100. Assets containing
    the missing sentinel anywhere are dropped.
    """
    table = read_percent_table(path)
    clean, _ = filter_complete_assets(table)
    gross = 1.0 + clean.values / 100.0
    return ReturnPanel(clean.dates, gross, clean.asset_ids, periodicity)


def load_price_panel_csv(path) -> PricePanel:
    """Load a wide or long price CSV as a dense price panel."""
    table = read_price_table(path)
    clean, _ = filter_complete_assets(table)
    return PricePanel(clean.dates, clean.values, clean.asset_ids)


def prices_to_returns(panel: PricePanel, periodicity: str = "daily") -> ReturnPanel:
    """Convert prices to gross returns R[k] = P[k+1] / P[k].

    The output has one fewer row; each return row keeps the date of the
    period it ends on.
    """
    if panel.m < 2:
        raise InsufficientDataError("need at least two price rows to form returns")
    returns = panel.prices[1:] / panel.prices[:-1]
    return ReturnPanel(panel.dates[1:], returns, panel.asset_ids, periodicity)


def slice_window(panel: ReturnPanel, end: int, length: int) -> ReturnPanel:
    """Return the trailing window of ``length`` rows ending at row ``end``.

    Both arguments are 1-based: the window covers rows [end-length+1, end].
    """
    if not 1 <= length <= end <= panel.m:
        raise WindowBoundsError(
            f"window (end={end}, length={length}) out of bounds for panel with {panel.m} rows"
        )
    lo = end - length
    return ReturnPanel(
        panel.dates[lo:end],
        panel.returns[lo:end],
        panel.asset_ids,
        panel.periodicity,
    )
