"""Scale-by-scale lead-lag estimation from grid-aligned returns.

Pipeline per level: band-pass filter the two return series (non-decimated
transform, boundary coefficients dropped), slide one set of coefficients
against the other over a lag grid, normalize the curve, and take the lag
with the largest absolute value. A single-scale baseline on the raw returns
serves as comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import DataError
from .filters import LevelFilter, base_filter, cascade, cascade_length
from .ingest import AlignedReturns

# direct convolution below this work estimate, FFT above
_FFT_THRESHOLD = 1 << 20


@dataclass(frozen=True)
class WaveletCoeffs:
    """Level-j coefficients for k = L_j - 1 .. n - 1 (boundary excluded)."""

    level: int
    filter_length: int
    n: int
    values: np.ndarray


@dataclass(frozen=True)
class LagGrid:
    """Symmetric, strictly increasing integer lag grid."""

    lags: np.ndarray

    def __post_init__(self):
        lags = np.asarray(self.lags, dtype=int)
        if lags.ndim != 1 or len(lags) == 0:
            raise DataError("lag grid must be a nonempty vector")
        if np.any(np.diff(lags) <= 0):
            raise DataError("lag grid must be strictly increasing")
        if not np.array_equal(lags, -lags[::-1]):
            raise DataError("lag grid must be symmetric around zero")
        lags.setflags(write=False)
        object.__setattr__(self, "lags", lags)

    @classmethod
    def symmetric(cls, half_width: int) -> "LagGrid":
        if half_width < 0:
            raise DataError(f"grid half-width must be >= 0, got {half_width}")
        return cls(np.arange(-half_width, half_width + 1))

    @property
    def half_width(self) -> int:
        return int(self.lags[-1])

    def __len__(self) -> int:
        return len(self.lags)


@dataclass(frozen=True)
class CrossCovCurve:
    """Per-scale cross-covariance over a lag grid, raw and normalized."""

    level: int
    tau: float
    lags: np.ndarray
    rho: np.ndarray
    rho_normalized: np.ndarray
    divisor: float


@dataclass(frozen=True)
class LagEstimate:
    """Argmax of |rho| over the grid with tie-break and degeneracy flags.

    Ties at the peak are broken by smallest |lag|, then by the negative
    one; ``tied`` records that the rule fired. An all-zero curve yields
    lag 0 with ``degenerate`` set.
    """

    level: int
    lag: int
    theta_seconds: float
    peak_value: float
    runner_up_gap: float
    tied: bool
    degenerate: bool


def _as_returns(returns) -> np.ndarray:
    if isinstance(returns, AlignedReturns):
        return returns.returns
    return np.asarray(returns, dtype=float)


def modwt(returns, level_filter: LevelFilter) -> WaveletCoeffs:
    """Filter a return series with a level-j filter, no circular wrap.

    Coefficient k (for k = L_j - 1 .. n - 1) is sum_p h_{j,p} r[k - p], so
    only fully-supported positions are kept.
    """
    x = _as_returns(returns)
    coef = level_filter.coefficients
    n, L = len(x), len(coef)
    if n < L:
        raise DataError(
            f"series shorter than filter: n={n} < L_j={L} at level {level_filter.level}"
        )
    if n * L > _FFT_THRESHOLD:
        values = fftconvolve(x, coef, mode="valid")
    else:
        values = np.convolve(x, coef, mode="valid")
    values.setflags(write=False)
    return WaveletCoeffs(level=level_filter.level, filter_length=L, n=n, values=values)


def _check_pair(w1: WaveletCoeffs, w2: WaveletCoeffs) -> None:
    if w1.level != w2.level:
        raise DataError(f"level mismatch: {w1.level} vs {w2.level}")
    if w1.n != w2.n or w1.filter_length != w2.filter_length:
        raise DataError("coefficient series have different shapes")


def cross_cov(w1: WaveletCoeffs, w2: WaveletCoeffs, lag: int, tau: float) -> float:
    """Lagged cross-covariance of two coefficient series at one level.

    For lag >= 0: (1/tau) * mean over k of W1_k * W2_(k+lag) with the mean
    taken over the n - lag - L_j + 1 admissible positions; mirrored for
    negative lags.
    """
    _check_pair(w1, w2)
    lag = int(lag)
    v1, v2 = w1.values, w2.values
    count = len(v1) - abs(lag)
    if count < 1:
        raise DataError(
            f"empty summation range at lag {lag}: only {len(v1)} coefficients"
        )
    if lag >= 0:
        s = float(np.dot(v1[:count], v2[lag : lag + count]))
    else:
        s = float(np.dot(v1[-lag : -lag + count], v2[:count]))
    return s / (tau * count)


def cross_cov_curve(
    w1: WaveletCoeffs, w2: WaveletCoeffs, grid: LagGrid, tau: float
) -> CrossCovCurve:
    """Evaluate the cross-covariance over the grid and normalize.

    The normalizer is the lag-independent geometric mean of the two series'
    second moments, (1/(tau * (n - L_j + 1))) * sqrt(sum W1^2 * sum W2^2),
    so identical inputs give exactly 1 at lag 0.
    """
    _check_pair(w1, w2)
    rho = np.array([cross_cov(w1, w2, l, tau) for l in grid.lags])
    count = len(w1.values)
    divisor = (
        np.sqrt(float(np.dot(w1.values, w1.values)) * float(np.dot(w2.values, w2.values)))
        / (tau * count)
    )
    if divisor > 0.0:
        normalized = rho / divisor
    else:
        normalized = np.zeros_like(rho)
    return CrossCovCurve(
        level=w1.level,
        tau=tau,
        lags=grid.lags,
        rho=rho,
        rho_normalized=normalized,
        divisor=float(divisor),
    )


def _argmax_with_tiebreak(lags: np.ndarray, values: np.ndarray):
    peak = float(values.max())
    candidates = lags[values == peak]
    chosen = min(candidates, key=lambda l: (abs(int(l)), int(l)))
    if len(values) > 1:
        rest = values[lags != chosen]
        gap = peak - float(rest.max())
    else:
        gap = peak
    return int(chosen), peak, gap, len(candidates) > 1


def estimate_lag(curve: CrossCovCurve) -> LagEstimate:
    """Lag with the largest |cross-covariance| on the grid."""
    lag, peak, gap, tied = _argmax_with_tiebreak(curve.lags, np.abs(curve.rho))
    return LagEstimate(
        level=curve.level,
        lag=lag,
        theta_seconds=lag * curve.tau,
        peak_value=peak,
        runner_up_gap=gap,
        tied=tied,
        degenerate=peak == 0.0,
    )


def hry_lag(
    ret1: AlignedReturns, ret2: AlignedReturns, grid: LagGrid, tau: float | None = None
) -> LagEstimate:
    """Single-scale baseline: argmax |sum_k r1[k] r2[k+l]| over the grid.

    On an equally spaced previous-tick grid the overlapping-interval
    contrast reduces to this raw cross-covariance of the aligned returns.
    """
    r1, r2 = ret1.returns, ret2.returns
    if len(r1) != len(r2):
        raise DataError(f"return series differ in length: {len(r1)} vs {len(r2)}")
    if tau is None:
        tau = ret1.tau
    n = len(r1)
    contrast = np.empty(len(grid.lags))
    for i, lag in enumerate(grid.lags):
        count = n - abs(int(lag))
        if count < 1:
            raise DataError(f"empty summation range at lag {lag}: n={n}")
        if lag >= 0:
            contrast[i] = np.dot(r1[:count], r2[lag : lag + count])
        else:
            contrast[i] = np.dot(r1[-lag : -lag + count], r2[:count])
    lag, peak, gap, tied = _argmax_with_tiebreak(grid.lags, np.abs(contrast))
    return LagEstimate(
        level=0,
        lag=lag,
        theta_seconds=lag * tau,
        peak_value=peak,
        runner_up_gap=gap,
        tied=tied,
        degenerate=peak == 0.0,
    )


def max_feasible_level(family: str, n: int) -> int:
    """Largest level whose cascade filter still fits in n samples."""
    base = base_filter(family)
    level = 0
    while cascade_length(base.length, level + 1) <= n:
        level += 1
    return level


def estimate_levels(
    ret1: AlignedReturns,
    ret2: AlignedReturns,
    family: str,
    j_max: int,
    grid: LagGrid,
) -> list[tuple[CrossCovCurve, LagEstimate]]:
    """Run the filter-curve-argmax pipeline for levels 1..j_max."""
    if ret1.n != ret2.n:
        raise DataError(f"return series differ in length: {ret1.n} vs {ret2.n}")
    if ret1.tau != ret2.tau:
        raise DataError(f"grid spacings differ: {ret1.tau} vs {ret2.tau}")
    if j_max < 1:
        raise DataError(f"need at least one level, got j_max={j_max}")
    base = base_filter(family)
    n, tau = ret1.n, ret1.tau
    top_length = cascade_length(base.length, j_max)
    if top_length + grid.half_width > n:
        feasible = max_feasible_level(family, n - grid.half_width)
        raise DataError(
            f"level {j_max} with grid half-width {grid.half_width} needs "
            f"{top_length + grid.half_width} samples but n={n}; "
            f"max feasible level is {feasible}"
        )
    out = []
    for level in range(1, j_max + 1):
        filt = cascade(base, level)
        w1 = modwt(ret1, filt)
        w2 = modwt(ret2, filt)
        curve = cross_cov_curve(w1, w2, grid, tau)
        out.append((curve, estimate_lag(curve)))
    return out


def estimate_all_levels(
    ret1: AlignedReturns,
    ret2: AlignedReturns,
    families,
    j_max: int,
    grid: LagGrid,
) -> dict[str, list[tuple[CrossCovCurve, LagEstimate]]]:
    """estimate_levels for several filter families at once."""
    return {
        family: estimate_levels(ret1, ret2, family, j_max, grid)
        for family in families
    }
