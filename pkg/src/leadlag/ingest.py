"""Tick ingestion and previous-tick alignment onto a regular grid.

Raw ticks (or simulated paths with missingness) become grid-aligned return
series: the value at grid point k is the last observation at or before it,
so intervals without a fresh observation contribute a zero return and the
next observed point aggregates everything since the previous one.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .model import ObservationScheme
from .simulate import PathSample

PRICE_SCALES = ("raw_price", "log_price")


@dataclass(frozen=True)
class TickSeries:
    """Irregular observations: nondecreasing timestamps, matching prices."""

    timestamps: np.ndarray
    prices: np.ndarray
    scale: str = "raw_price"

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=float)
        px = np.asarray(self.prices, dtype=float)
        if ts.shape != px.shape or ts.ndim != 1:
            raise DataError(
                f"timestamps and prices must be equal-length vectors, "
                f"got {ts.shape} and {px.shape}"
            )
        if len(ts) == 0:
            raise DataError("no ticks")
        if np.any(np.diff(ts) < 0):
            row = int(np.argmax(np.diff(ts) < 0)) + 2
            raise DataError(f"timestamps decrease at row {row}")
        if self.scale not in PRICE_SCALES:
            raise DataError(f"unknown price scale {self.scale!r}")
        if self.scale == "raw_price" and np.any(px <= 0):
            row = int(np.argmax(px <= 0)) + 1
            raise DataError(f"non-positive price at row {row}")
        ts.setflags(write=False)
        px.setflags(write=False)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "prices", px)

    def __len__(self) -> int:
        return len(self.timestamps)

    def log_values(self) -> np.ndarray:
        if self.scale == "log_price":
            return self.prices
        return np.log(self.prices)


@dataclass(frozen=True)
class AlignedReturns:
    """Grid-aligned returns with per-point observation flags.

    ``returns`` has n entries (return k spans grid points k to k+1) and
    ``observed`` has n+1 entries; observed[0] is always True. Returns over
    intervals whose right endpoint was not observed are exactly zero.
    """

    t0: float
    tau: float
    n: int
    returns: np.ndarray
    observed: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.returns, dtype=float)
        o = np.asarray(self.observed, dtype=bool)
        if len(r) != self.n or len(o) != self.n + 1:
            raise DataError(
                f"need {self.n} returns and {self.n + 1} flags, "
                f"got {len(r)} and {len(o)}"
            )
        if not o[0]:
            raise DataError("grid origin must be observed")
        r.setflags(write=False)
        o.setflags(write=False)
        object.__setattr__(self, "returns", r)
        object.__setattr__(self, "observed", o)


def read_csv(path, scale: str = "raw_price") -> TickSeries:
    """Parse a tick CSV with header columns ``timestamp`` and ``price``.

    Leading '#' comment lines are skipped; data rows are numbered from 1 in
    error messages.
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = None
        for row in reader:
            if not row or row[0].lstrip().startswith("#"):
                continue
            header = [c.strip().lower() for c in row]
            break
        if header is None:
            raise DataError(f"no ticks in {path}")
        try:
            t_col = header.index("timestamp")
            p_col = header.index("price")
        except ValueError:
            raise DataError(
                f"{path}: header must name 'timestamp' and 'price' columns, "
                f"got {header}"
            )
        times, prices = [], []
        for i, row in enumerate(reader, start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                times.append(float(row[t_col]))
                prices.append(float(row[p_col]))
            except (ValueError, IndexError):
                raise DataError(f"{path}: malformed row {i}: {row!r}")
    if not times:
        raise DataError(f"no ticks in {path}")
    try:
        return TickSeries(np.array(times), np.array(prices), scale=scale)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from exc


def previous_tick_fill(values: np.ndarray, observed: np.ndarray) -> np.ndarray:
    """Carry the last observed value forward; index 0 must be observed."""
    idx = np.where(observed, np.arange(len(values)), 0)
    np.maximum.accumulate(idx, out=idx)
    return values[idx]


def align_to_grid(ticks: TickSeries, t0: float, tau: float, n: int) -> AlignedReturns:
    """Previous-tick interpolation of a tick series onto grid t0 + k*tau.

    Grid point k takes the log of the last price at time <= t0 + k*tau
    (ties: the last tick wins); it counts as observed when at least one tick
    fell in (t0 + (k-1)*tau, t0 + k*tau]. Returns are first differences of
    the grid values.
    """
    if n <= 0:
        raise DataError(f"need a positive number of grid steps, got {n}")
    if tau <= 0:
        raise DataError(f"grid spacing must be positive, got {tau}")
    grid = t0 + np.arange(n + 1) * tau
    idx = np.searchsorted(ticks.timestamps, grid, side="right") - 1
    if idx[0] < 0:
        raise DataError(
            f"no tick at or before the grid origin t0={t0} "
            f"(first tick at {ticks.timestamps[0]})"
        )
    values = ticks.log_values()[idx]
    observed = np.empty(n + 1, dtype=bool)
    observed[0] = True
    observed[1:] = idx[1:] > idx[:-1]
    return AlignedReturns(
        t0=t0, tau=tau, n=n, returns=np.diff(values), observed=observed
    )


def returns_from_sample(
    sample: PathSample, scheme: ObservationScheme
) -> tuple[AlignedReturns, AlignedReturns]:
    """Turn simulated increments plus missingness masks into the pseudo
    returns an observer of the masked grid would reconstruct."""
    n = scheme.n
    out = []
    for returns, mask in (
        (sample.returns1, sample.mask1),
        (sample.returns2, sample.mask2),
    ):
        if len(returns) != n or len(mask) != n + 1:
            raise DataError(
                f"sample length mismatch: {len(returns)} returns / "
                f"{len(mask)} flags for n={n}"
            )
        if mask[0]:
            raise DataError("grid origin cannot be missing")
        levels = np.concatenate(([0.0], np.cumsum(returns)))
        observed = ~np.asarray(mask, dtype=bool)
        filled = previous_tick_fill(levels, observed)
        out.append(
            AlignedReturns(
                t0=0.0, tau=scheme.tau, n=n, returns=np.diff(filled), observed=observed
            )
        )
    return out[0], out[1]


def write_aligned_csv(aligned: AlignedReturns, fh) -> None:
    """Write rows k,return,observed; the flag is for the return's right
    endpoint (grid point k+1)."""
    fh.write("# leadlag-aligned schema_version=1\n")
    fh.write("k,return,observed\n")
    for k in range(aligned.n):
        fh.write(f"{k},{float(aligned.returns[k])!r},{int(aligned.observed[k + 1])}\n")
