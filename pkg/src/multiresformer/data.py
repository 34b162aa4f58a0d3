"""CSV ingestion, chronological splitting, and synthetic series generation.

Input files are delimiter-separated values with an optional header and an
optional leading timestamp column (the usual benchmark layout: columns are
variates, rows are time steps). Cells must parse as finite floats; anything
else is rejected with its row/column location.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DataError

Array = np.ndarray


@dataclass
class TimeSeries:
    values: Array
    variate_names: list[str]
    timestamps: list[str] | None = None
    metadata: dict | None = None

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[0] < 1 or self.values.shape[1] < 1:
            raise ContractError(f"TimeSeries: values must be a (T, V) matrix, got shape {self.values.shape}")
        if not np.isfinite(self.values).all():
            raise ContractError("TimeSeries: values must be finite")
        if len(self.variate_names) != self.values.shape[1]:
            raise ContractError(
                f"TimeSeries: {len(self.variate_names)} names for {self.values.shape[1]} variates"
            )

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def num_variates(self) -> int:
        return self.values.shape[1]


@dataclass
class SplitSpec:
    train_frac: float = 0.7
    val_frac: float = 0.1
    test_frac: float = 0.2

    def __post_init__(self) -> None:
        fracs = (self.train_frac, self.val_frac, self.test_frac)
        if any(f < 0 for f in fracs):
            raise ContractError(f"SplitSpec: fractions must be >= 0, got {fracs}")
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise ContractError(f"SplitSpec: fractions must sum to 1, got {fracs}")


@dataclass
class SplitResult:
    """Chronological train/val/test segments plus the train-only
    standardization statistics that were applied to all three."""

    train: TimeSeries
    val: TimeSeries
    test: TimeSeries
    mean: Array
    std: Array


def load_csv(path: str, has_header: bool = True, timestamp_col: int | str | None = None) -> TimeSeries:
    """Read a delimited file into a TimeSeries: columns become variates,
    rows become time steps.

    Raises:
        DataError: for an empty file or any cell that is not a finite float,
            naming the 1-based row and column.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise DataError(f"{path}: empty file")
    header: list[str] | None = None
    if has_header:
        header = [cell.strip() for cell in rows[0]]
        rows = rows[1:]
        if not rows:
            raise DataError(f"{path}: header but no data rows")
    width = len(rows[0])
    ts_index: int | None = None
    if timestamp_col is not None:
        if isinstance(timestamp_col, str):
            if header is None or timestamp_col not in header:
                raise DataError(f"{path}: timestamp column {timestamp_col!r} not found in header")
            ts_index = header.index(timestamp_col)
        else:
            ts_index = int(timestamp_col)
            if not 0 <= ts_index < width:
                raise DataError(f"{path}: timestamp column index {ts_index} out of range")

    timestamps: list[str] | None = [] if ts_index is not None else None
    parsed: list[list[float]] = []
    for r, row in enumerate(rows):
        if len(row) != width:
            raise DataError(f"{path}: row {r + 1} has {len(row)} cells, expected {width}")
        record = []
        for c, cell in enumerate(row):
            if c == ts_index:
                timestamps.append(cell.strip())  # type: ignore[union-attr]
                continue
            try:
                value = float(cell)
            except ValueError as exc:
                raise DataError(f"{path}: row {r + 1}, column {c + 1}: cannot parse {cell!r}") from exc
            if not math.isfinite(value):
                raise DataError(f"{path}: row {r + 1}, column {c + 1}: non-finite value {cell!r}")
            record.append(value)
        parsed.append(record)
    if header is not None:
        names = [name for i, name in enumerate(header) if i != ts_index]
    else:
        names = [f"v{i}" for i in range(width - (1 if ts_index is not None else 0))]
    return TimeSeries(values=np.asarray(parsed), variate_names=names, timestamps=timestamps)


def save_csv(series: TimeSeries, path: str) -> None:
    """Write back in the same layout load_csv reads (header, optional
    timestamp column, shortest round-trip float repr)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        if series.timestamps is not None:
            writer.writerow(["timestamp"] + series.variate_names)
            for stamp, row in zip(series.timestamps, series.values):
                writer.writerow([stamp] + [repr(float(v)) for v in row])
        else:
            writer.writerow(series.variate_names)
            for row in series.values:
                writer.writerow([repr(float(v)) for v in row])


def _slice_series(series: TimeSeries, start: int, stop: int) -> TimeSeries:
    return TimeSeries(
        values=series.values[start:stop].copy(),
        variate_names=list(series.variate_names),
        timestamps=series.timestamps[start:stop] if series.timestamps is not None else None,
    )


def chrono_split(series: TimeSeries, spec: SplitSpec = SplitSpec(), standardize: bool = True) -> SplitResult:
    """Cut at floor(T*train) and floor(T*(train+val)); segments stay
    contiguous and disjoint. Standardization statistics come from the train
    segment only and are applied to all three."""
    total = series.length
    train_end = int(total * spec.train_frac)
    val_end = int(total * (spec.train_frac + spec.val_frac))
    return split_at_indices(series, train_end, val_end, standardize=standardize)


def split_at_indices(
    series: TimeSeries, train_end: int, val_end: int, standardize: bool = True
) -> SplitResult:
    """Explicit-boundary variant of chrono_split for bespoke benchmark
    splits."""
    if not 0 <= train_end <= val_end <= series.length:
        raise ContractError(
            f"split_at_indices: need 0 <= {train_end} <= {val_end} <= {series.length}"
        )
    segments = (
        _slice_series(series, 0, train_end),
        _slice_series(series, train_end, val_end),
        _slice_series(series, val_end, series.length),
    )
    train_values = series.values[:train_end]
    if train_values.shape[0] == 0:
        raise ContractError("split_at_indices: empty train segment")
    mean = train_values.mean(axis=0)
    std = train_values.std(axis=0)
    std = np.where(std > 0, std, 1.0)  # constant variates pass through centered
    if standardize:
        for segment in segments:
            segment.values = (segment.values - mean) / std
    return SplitResult(train=segments[0], val=segments[1], test=segments[2], mean=mean, std=std)


def synth_multiperiodic(
    length: int,
    specs: list[tuple[float, float, float]],
    trend_slope: float = 0.0,
    noise_std: float = 0.0,
    seed: int = 0,
    num_variates: int = 1,
) -> TimeSeries:
    """Sum of sinusoids (period, amplitude, phase) plus a linear trend and
    seeded Gaussian noise.

    Variates beyond the first reuse the same components with seeded phase
    offsets. Ground-truth periods are recorded in ``metadata`` so detector
    tests can validate against them.
    """
    if length < 1:
        raise ContractError(f"synth_multiperiodic: length must be >= 1, got {length}")
    for period, _, _ in specs:
        if period < 2:
            raise ContractError(f"synth_multiperiodic: periods must be >= 2, got {period}")
        if length < period:
            raise ContractError(
                f"synth_multiperiodic: length {length} shorter than period {period}"
            )
    rng = np.random.default_rng(seed)
    t = np.arange(length, dtype=np.float64)
    values = np.zeros((length, num_variates))
    for v in range(num_variates):
        signal = trend_slope * t
        for period, amplitude, phase in specs:
            offset = 0.0 if v == 0 else rng.uniform(0.0, 2.0 * np.pi)
            signal = signal + amplitude * np.sin(2.0 * np.pi * t / period + phase + offset)
        if noise_std > 0:
            signal = signal + rng.normal(0.0, noise_std, size=length)
        values[:, v] = signal
    return TimeSeries(
        values=values,
        variate_names=[f"v{i}" for i in range(num_variates)],
        metadata={
            "periods": [float(p) for p, _, _ in specs],
            "amplitudes": [float(a) for _, a, _ in specs],
            "phases": [float(ph) for _, _, ph in specs],
            "trend_slope": float(trend_slope),
            "noise_std": float(noise_std),
            "seed": int(seed),
        },
    )
