"""CSV ingestion and file emission."""

from __future__ import annotations

import csv
import datetime as dt
import json
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from futopt.domain import TRADING_DAYS, PriceSeries
from futopt.errors import EmptyFile, NonMonotoneDates, ParseError

SIG_DIGITS = 10


def fmt(x) -> str:
    """Numbers with 10 significant digits; None becomes an empty field."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return f"{float(x):.{SIG_DIGITS}g}"


def rounded(obj):
    """Recursively round floats to 10 significant digits for JSON output."""
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else fmt(obj)
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    return obj


def dump_json(obj, path: Optional[Path] = None) -> str:
    text = json.dumps(rounded(obj), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def infer_step(dates: Sequence[dt.date]) -> float:
    """Observation spacing in years from the median gap between dates.

    Gaps are counted in business days over 252 per year, so a daily
    settlement series with weekend gaps comes out as 1/252. Calendar days
    over 365 are used only when the median business-day gap is zero.
    """
    d = np.array(dates, dtype="datetime64[D]")
    busdays = np.busday_count(d[:-1], d[1:])
    med = float(np.median(busdays))
    if med >= 1:
        return med / TRADING_DAYS
    calendar = (d[1:] - d[:-1]).astype(np.int64)
    return float(np.median(calendar)) / 365.0


def ingest_csv(path, date_col: str = "date", price_col: str = "settle",
               step: Optional[float] = None, label: Optional[str] = None) -> PriceSeries:
    """Read a ``date,settle`` file into a chronological PriceSeries.

    Line numbers in errors count the header as line 1.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = None
        for row in reader:
            if any(cell.strip() for cell in row):
                header = [c.strip() for c in row]
                break
        if header is None:
            raise EmptyFile(f"{path} has no header row")
        try:
            di, pi = header.index(date_col), header.index(price_col)
        except ValueError:
            raise ParseError(reader.line_num, f"header must contain {date_col!r} and {price_col!r}") from None

        dates: list[dt.date] = []
        values: list[float] = []
        for row in reader:
            line = reader.line_num
            if not any(cell.strip() for cell in row):
                continue
            if len(row) <= max(di, pi):
                raise ParseError(line, "missing column")
            raw_date, raw_price = row[di].strip(), row[pi].strip()
            if not raw_price:
                raise ParseError(line, f"missing {price_col}")
            try:
                when = dt.date.fromisoformat(raw_date)
            except ValueError:
                raise ParseError(line, f"bad date {raw_date!r}") from None
            try:
                price = float(raw_price)
            except ValueError:
                raise ParseError(line, f"bad price {raw_price!r}") from None
            if not math.isfinite(price):
                raise ParseError(line, f"non-finite price {raw_price!r}")
            if dates and when <= dates[-1]:
                raise NonMonotoneDates(f"line {line}: {when} does not follow {dates[-1]}")
            dates.append(when)
            values.append(price)

    if not values:
        raise EmptyFile(f"{path} has no data rows")
    if step is None:
        step = infer_step(dates) if len(dates) > 1 else 1.0 / TRADING_DAYS
    return PriceSeries(values, step, label if label is not None else path.stem)


def write_series_csv(series: PriceSeries, path, start: dt.date = dt.date(2020, 1, 1)) -> Path:
    """Write prices on consecutive business days; values round-trip bit-exactly."""
    dates = np.busday_offset(np.datetime64(start, "D"), np.arange(len(series)), roll="forward")
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "settle"])
        for d, v in zip(dates, series.values):
            w.writerow([str(d), repr(float(v))])
    return path


def write_paths_csv(paths: np.ndarray, times: np.ndarray, path) -> Path:
    """One row per time point, one column per simulated path."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time"] + [f"path_{j}" for j in range(paths.shape[1])])
        for t, row in zip(times, paths):
            w.writerow([fmt(t)] + [fmt(v) for v in row])
    return path


def write_rows_csv(rows: Iterable[dict], columns: Sequence[str], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(row.get(c)) for c in columns])
    return path


def line_plot(x, series: dict, path, xlabel: str, ylabel: str, title: str = "") -> Path:
    """Static SVG line plot; ``series`` maps a legend label to y values (None = gap)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 5))
    for name, ys in series.items():
        y = np.array([np.nan if v is None else v for v in ys], dtype=float)
        if np.all(np.isnan(y)):
            continue
        ax.plot(x, y, label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) <= 10:
        ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
