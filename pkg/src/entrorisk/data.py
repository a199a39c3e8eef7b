"""
Return panels: containers, CSV ingestion, sample splitting and synthetic data.

A :class:`Dataset` bundles the securities' daily returns with the market
return and the risk-free rate, all on one shared calendar.  Every estimator
in the package consumes *premiums* (return minus risk-free rate), which
:func:`premiums` derives element-wise.

CSV panel format
----------------
UTF-8, comma separated, one header row.  The first column is ``date``
(``YYYY-MM-DD``); the remaining columns hold decimal daily returns
(``0.012`` is 1.2%).  The market and risk-free columns default to ``MKT``
and ``RF``; all other columns are securities.  Lines starting with ``#``
before the header are treated as comments.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError

__all__ = [
    "ReturnSeries",
    "Dataset",
    "PremiumSeries",
    "RegimeEntry",
    "RegimeCalendar",
    "WindowSplit",
    "load_dataset",
    "write_panel",
    "load_regime_calendar",
    "premiums",
    "split_in_out",
    "concat_datasets",
    "rolling_windows",
    "apply_window",
    "filter_by_regime",
    "generate_synthetic",
]

MARKET_COLUMN = "MKT"
RISK_FREE_COLUMN = "RF"


def _frozen(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def _as_dates(dates) -> np.ndarray:
    return _frozen(np.asarray(dates, dtype="datetime64[D]"), dtype="datetime64[D]")


@dataclass(frozen=True)
class ReturnSeries:
    """Daily simple returns of one instrument."""

    security_id: str
    dates: np.ndarray
    returns: np.ndarray

    def __post_init__(self):
        dates = self.dates
        if not (isinstance(dates, np.ndarray) and dates.dtype == "datetime64[D]" and not dates.flags.writeable):
            dates = _as_dates(dates)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "returns", _frozen(self.returns))
        if dates.ndim != 1 or self.returns.ndim != 1:
            raise DataError(f"{self.security_id}: dates and returns must be one-dimensional")
        if len(dates) != len(self.returns):
            raise DataError(
                f"{self.security_id}: {len(dates)} dates but {len(self.returns)} returns"
            )
        if len(dates) > 1 and not np.all(dates[1:] > dates[:-1]):
            raise DataError(f"{self.security_id}: unsorted or duplicate dates")
        if not np.all(np.isfinite(self.returns)):
            raise DataError(f"{self.security_id}: non-finite return")
        if np.any(self.returns <= -1.0):
            raise DataError(f"{self.security_id}: return <= -100%")

    def __len__(self) -> int:
        return len(self.returns)


@dataclass(frozen=True)
class PremiumSeries:
    """Daily excess returns ``R_i - R_F`` of one instrument."""

    security_id: str
    premiums: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "premiums", _frozen(self.premiums))

    def __len__(self) -> int:
        return len(self.premiums)


@dataclass(frozen=True)
class Dataset:
    """Securities, market and risk-free returns on one shared calendar."""

    securities: tuple[ReturnSeries, ...]
    market: ReturnSeries
    risk_free: ReturnSeries

    def __post_init__(self):
        object.__setattr__(self, "securities", tuple(self.securities))
        if not self.securities:
            raise DataError("dataset has no securities")
        dates = self.market.dates
        if len(dates) < 2:
            raise DataError("dataset needs at least 2 observations")
        for s in (*self.securities, self.risk_free):
            if s.dates is not dates and not np.array_equal(s.dates, dates):
                raise DataError(f"{s.security_id}: dates differ from the market series")
        ids = self.ids
        if len(set(ids)) != len(ids):
            raise DataError("duplicate security identifiers")

    @classmethod
    def from_arrays(
        cls,
        ids: Sequence[str],
        dates,
        returns,
        market,
        risk_free,
        market_id: str = MARKET_COLUMN,
        risk_free_id: str = RISK_FREE_COLUMN,
    ) -> "Dataset":
        """Build a dataset from a ``(securities, days)`` return matrix."""
        dates = _as_dates(dates)
        returns = np.asarray(returns, dtype=float)
        if returns.ndim != 2 or returns.shape[0] != len(ids):
            raise DataError(f"return matrix shape {returns.shape} does not match {len(ids)} ids")
        securities = tuple(ReturnSeries(str(i), dates, r) for i, r in zip(ids, returns))
        return cls(
            securities,
            ReturnSeries(market_id, dates, market),
            ReturnSeries(risk_free_id, dates, risk_free),
        )

    @property
    def dates(self) -> np.ndarray:
        return self.market.dates

    @property
    def n_obs(self) -> int:
        return len(self.market)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(s.security_id for s in self.securities)

    @cached_property
    def returns_matrix(self) -> np.ndarray:
        """Security returns as a read-only ``(securities, days)`` array."""
        return _frozen(np.stack([s.returns for s in self.securities]))

    @cached_property
    def premium_matrix(self) -> np.ndarray:
        """Security premiums as a read-only ``(securities, days)`` array."""
        return _frozen(self.returns_matrix - self.risk_free.returns)

    @cached_property
    def market_premium(self) -> np.ndarray:
        return _frozen(self.market.returns - self.risk_free.returns)

    def take(self, index) -> "Dataset":
        """Sub-dataset on the observations selected by ``index`` (mask or positions)."""
        dates = self.dates[index]
        return Dataset.from_arrays(
            self.ids,
            dates,
            self.returns_matrix[:, index],
            self.market.returns[index],
            self.risk_free.returns[index],
            market_id=self.market.security_id,
            risk_free_id=self.risk_free.security_id,
        )


# -- ingestion ---------------------------------------------------------------


def _parse_float(text: str, row: int, column: str, path) -> float:
    if text.strip() == "":
        raise DataError(f"{path}: row {row}, column '{column}': missing value")
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"{path}: row {row}, column '{column}': not a number: {text!r}") from None
    if not math.isfinite(value):
        raise DataError(f"{path}: row {row}, column '{column}': non-finite value {text!r}")
    return value


def _data_lines(fh) -> Iterable[str]:
    header_seen = False
    for line in fh:
        if not header_seen and (line.startswith("#") or not line.strip()):
            continue
        header_seen = True
        yield line


def load_dataset(
    panel_file,
    market_column: str = MARKET_COLUMN,
    risk_free_column: str = RISK_FREE_COLUMN,
) -> Dataset:
    """
    Read a panel CSV into a :class:`Dataset`.

    Rows with a missing value in any column are rejected rather than
    imputed.  Row numbers in error messages count data rows from 1.

    Raises
    ------
    DataError
        On unreadable or malformed files, missing columns, unsorted or
        duplicate dates, missing values, or fewer than 2 rows.
    """
    path = Path(panel_file)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"{path}: cannot open panel file ({exc.strerror})") from None
    with fh:
        reader = csv.reader(_data_lines(fh))
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        except csv.Error as exc:
            raise DataError(f"{path}: malformed CSV: {exc}") from None
        header = [h.strip() for h in header]
        if not header or header[0].lower() != "date":
            raise DataError(f"{path}: first column must be 'date'")
        if len(set(header)) != len(header):
            raise DataError(f"{path}: duplicate column names")
        for col in (market_column, risk_free_column):
            if col not in header:
                raise DataError(f"{path}: missing column '{col}'")
        sec_cols = [h for h in header[1:] if h not in (market_column, risk_free_column)]
        if not sec_cols:
            raise DataError(f"{path}: no security columns")

        dates, rows = [], []
        try:
            for row_no, rec in enumerate(reader, start=1):
                if not rec or all(not c.strip() for c in rec):
                    continue
                if len(rec) != len(header):
                    raise DataError(
                        f"{path}: row {row_no}: expected {len(header)} fields, got {len(rec)}"
                    )
                try:
                    dates.append(np.datetime64(rec[0].strip(), "D"))
                except ValueError:
                    raise DataError(f"{path}: row {row_no}: bad date {rec[0]!r}") from None
                rows.append([_parse_float(v, row_no, c, path) for v, c in zip(rec[1:], header[1:])])
        except csv.Error as exc:
            raise DataError(f"{path}: malformed CSV: {exc}") from None

    if len(rows) < 2:
        raise DataError(f"{path}: need at least 2 rows, found {len(rows)}")
    dates = np.array(dates, dtype="datetime64[D]")
    step = np.diff(dates).astype(int)
    if np.any(step == 0):
        bad = int(np.argmax(step == 0)) + 2
        raise DataError(f"{path}: duplicate date at row {bad}")
    if np.any(step < 0):
        bad = int(np.argmax(step < 0)) + 2
        raise DataError(f"{path}: unsorted dates at row {bad}")

    table = np.array(rows, dtype=float).T
    col = {name: i for i, name in enumerate(header[1:])}
    try:
        return Dataset.from_arrays(
            sec_cols,
            dates,
            table[[col[c] for c in sec_cols]],
            table[col[market_column]],
            table[col[risk_free_column]],
            market_id=market_column,
            risk_free_id=risk_free_column,
        )
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


def write_panel(d: Dataset, path, header_lines: Sequence[str] = ()) -> None:
    """Write ``d`` in the panel CSV format; floats use shortest round-trip repr."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", *d.ids, d.market.security_id, d.risk_free.security_id])
        cols = np.vstack([d.returns_matrix, d.market.returns, d.risk_free.returns]).T
        for day, vals in zip(d.dates, cols):
            w.writerow([str(day), *(repr(float(v)) for v in vals)])


# -- premiums and splits -----------------------------------------------------


def premiums(d: Dataset) -> list[PremiumSeries]:
    """Excess returns of every security, followed by the market's."""
    out = [PremiumSeries(i, p) for i, p in zip(d.ids, d.premium_matrix)]
    out.append(PremiumSeries(d.market.security_id, d.market_premium))
    return out


def split_in_out(d: Dataset, m: int) -> tuple[Dataset, Dataset]:
    """First ``m`` observations and the remaining ones; each part keeps >= 2 rows."""
    n = d.n_obs
    if not 2 <= m <= n - 2:
        raise DataError(f"split point m={m} outside [2, {n - 2}] for {n} observations")
    return d.take(slice(0, m)), d.take(slice(m, n))


def concat_datasets(first: Dataset, second: Dataset) -> Dataset:
    """Join two datasets over time (inverse of :func:`split_in_out`)."""
    if first.ids != second.ids:
        raise DataError("security sets differ")
    return Dataset.from_arrays(
        first.ids,
        np.concatenate([first.dates, second.dates]),
        np.hstack([first.returns_matrix, second.returns_matrix]),
        np.concatenate([first.market.returns, second.market.returns]),
        np.concatenate([first.risk_free.returns, second.risk_free.returns]),
        market_id=first.market.security_id,
        risk_free_id=first.risk_free.security_id,
    )


@dataclass(frozen=True)
class WindowSplit:
    """In-sample and following out-of-sample date ranges (inclusive bounds)."""

    in_range: tuple[np.datetime64, np.datetime64]
    out_range: tuple[np.datetime64, np.datetime64]

    def __post_init__(self):
        (a, b), (c, e) = self.in_range, self.out_range
        if not (a <= b < c <= e):
            raise DataError("in-sample range must precede a disjoint out-of-sample range")

    @property
    def label(self) -> str:
        y = lambda t: str(t)[:4]  # noqa: E731
        return f"{y(self.in_range[0])}-{y(self.in_range[1])}/{y(self.out_range[0])}-{y(self.out_range[1])}"


def _year(dates: np.ndarray) -> np.ndarray:
    return dates.astype("datetime64[Y]").astype(int) + 1970


def rolling_windows(
    d: Dataset, window_len_years: int = 10, step_years: int = 1, in_years: int = 5
) -> list[WindowSplit]:
    """
    Calendar-year rolling windows split into an in-sample and out-of-sample part.

    A year counts once it holds any observation.  With the defaults, a
    dataset spanning 27 calendar years yields 18 windows.
    """
    if step_years < 1 or not 1 <= in_years < window_len_years:
        raise DataError("need step >= 1 and 1 <= in_years < window_len_years")
    years = _year(d.dates)
    first, last = int(years[0]), int(years[-1])
    n_years = last - first + 1
    if n_years < window_len_years:
        raise DataError(
            f"dataset spans {n_years} calendar years, shorter than the {window_len_years}-year window"
        )
    out = []
    for start in range(first, last - window_len_years + 2, step_years):
        y0, y1, y2 = start, start + in_years, start + window_len_years
        out.append(
            WindowSplit(
                (np.datetime64(f"{y0}-01-01"), np.datetime64(f"{y1 - 1}-12-31")),
                (np.datetime64(f"{y1}-01-01"), np.datetime64(f"{y2 - 1}-12-31")),
            )
        )
    return out


def apply_window(d: Dataset, w: WindowSplit) -> tuple[Dataset, Dataset]:
    """Cut ``d`` into the in-sample and out-of-sample parts of ``w``."""
    t = d.dates
    parts = []
    for lo, hi in (w.in_range, w.out_range):
        mask = (t >= lo) & (t <= hi)
        if mask.sum() < 2:
            raise DataError(f"window {w.label}: fewer than 2 observations in {lo}..{hi}")
        parts.append(d.take(mask))
    return parts[0], parts[1]


# -- regimes -----------------------------------------------------------------

REGIME_LABELS = ("bull", "bear")


@dataclass(frozen=True)
class RegimeEntry:
    start: np.datetime64
    end: np.datetime64
    label: str

    def __post_init__(self):
        object.__setattr__(self, "start", np.datetime64(self.start, "D"))
        object.__setattr__(self, "end", np.datetime64(self.end, "D"))
        if self.label not in REGIME_LABELS:
            raise DataError(f"regime label must be bull or bear, got {self.label!r}")
        if self.start > self.end:
            raise DataError(f"regime interval {self.start}..{self.end} is reversed")


@dataclass(frozen=True)
class RegimeCalendar:
    """Labelled, non-overlapping date intervals (bounds inclusive)."""

    entries: tuple[RegimeEntry, ...] = field(default_factory=tuple)

    def __post_init__(self):
        entries = tuple(
            e if isinstance(e, RegimeEntry) else RegimeEntry(*e) for e in self.entries
        )
        ordered = sorted(entries, key=lambda e: e.start)
        for a, b in zip(ordered, ordered[1:]):
            if b.start <= a.end:
                raise DataError(f"regime intervals overlap: {a.start}..{a.end} and {b.start}..{b.end}")
        object.__setattr__(self, "entries", tuple(ordered))

    def mask(self, dates: np.ndarray, label: str) -> np.ndarray:
        """Boolean mask of ``dates`` falling inside intervals labelled ``label``."""
        m = np.zeros(len(dates), dtype=bool)
        for e in self.entries:
            if e.label == label:
                m |= (dates >= e.start) & (dates <= e.end)
        return m


def load_regime_calendar(path) -> RegimeCalendar:
    """Read a ``start,end,label`` CSV."""
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"{path}: cannot open regime calendar ({exc.strerror})") from None
    with fh:
        reader = csv.DictReader(_data_lines(fh))
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["start", "end", "label"]:
            raise DataError(f"{path}: expected header 'start,end,label'")
        entries = []
        for row_no, rec in enumerate(reader, start=1):
            try:
                entries.append(
                    RegimeEntry(
                        np.datetime64(rec["start"].strip(), "D"),
                        np.datetime64(rec["end"].strip(), "D"),
                        rec["label"].strip().lower(),
                    )
                )
            except (ValueError, AttributeError) as exc:
                raise DataError(f"{path}: row {row_no}: {exc}") from None
    return RegimeCalendar(tuple(entries))


def filter_by_regime(d: Dataset, cal: RegimeCalendar, label: str) -> Dataset:
    """Observations whose date lies in a ``label`` interval, concatenated in date order."""
    if label not in REGIME_LABELS:
        raise DataError(f"regime label must be bull or bear, got {label!r}")
    mask = cal.mask(d.dates, label)
    if not mask.any():
        raise DataError(f"empty regime sample for '{label}'")
    if mask.sum() < 2:
        raise DataError(f"regime '{label}' holds a single observation")
    return d.take(mask)


# -- synthetic data ----------------------------------------------------------


def business_days(start, n_days: int) -> np.ndarray:
    """The first ``n_days`` weekdays on or after ``start``."""
    return np.busday_offset(np.datetime64(start, "D"), np.arange(n_days), roll="forward")


def generate_synthetic(
    n_securities: int,
    n_days: int,
    betas,
    market_vol: float,
    idio_vols,
    market_drift=0.0,
    seed: int = 0,
    risk_free: float = 0.0,
    start: str = "1985-01-01",
) -> Dataset:
    """
    Single-factor synthetic panel.

    The market premium is i.i.d. Gaussian with mean ``market_drift`` and
    standard deviation ``market_vol``; security ``i`` has premium
    ``betas[i] * market + N(0, idio_vols[i])``.  ``market_drift`` may also be
    a per-day array.  The risk-free rate is the constant ``risk_free``.
    Identical arguments give bit-identical datasets.
    """
    betas = np.asarray(betas, dtype=float)
    idio_vols = np.asarray(idio_vols, dtype=float)
    if n_securities < 1 or n_days < 2:
        raise DataError("need at least 1 security and 2 days")
    if betas.shape != (n_securities,) or idio_vols.shape != (n_securities,):
        raise DataError("betas and idio_vols must have one entry per security")
    if market_vol < 0 or np.any(idio_vols < 0):
        raise DataError("volatilities must be non-negative")
    drift = np.broadcast_to(np.asarray(market_drift, dtype=float), (n_days,))

    rng = np.random.default_rng(seed)
    market = drift + market_vol * rng.standard_normal(n_days)
    noise = rng.standard_normal((n_securities, n_days)) * idio_vols[:, None]
    prem = betas[:, None] * market + noise
    rf = np.full(n_days, float(risk_free))
    width = max(3, len(str(n_securities)))
    ids = [f"S{i + 1:0{width}d}" for i in range(n_securities)]
    return Dataset.from_arrays(ids, business_days(start, n_days), prem + rf, market + rf, rf)
