"""Bivariate Gaussian increment paths via multivariate circulant embedding.

Each series is marginally a Brownian increment sequence (white, variance tau
per step); the pair carries the model's band-structured cross-covariance.
Per frequency the 2x2 spectral matrix is [[tau, s], [conj(s), tau]] with
eigenvalues tau +- |s|, so the embedding is valid exactly when the implied
cross spectrum stays below tau, which admissibility (|corr| <= 1) guarantees
up to truncation ripple.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericError
from .model import ObservationScheme, SpectralModel, increment_cross_cov

logger = logging.getLogger(__name__)

# eigenvalues this far below zero (relative to tau) abort; closer ones clip
EIGENVALUE_FLOOR = 1e-8


@dataclass(frozen=True)
class PathSample:
    """One simulated draw: n increments per series plus n+1 missingness flags.

    mask entries are True where the corresponding grid point is missing;
    index 0 is always observed.
    """

    returns1: np.ndarray
    returns2: np.ndarray
    mask1: np.ndarray
    mask2: np.ndarray
    seed: int


@dataclass(frozen=True)
class CovarianceTables:
    """Target second moments: auto at lags 0..maxlag, cross at -maxlag..maxlag."""

    auto1: np.ndarray
    auto2: np.ndarray
    cross: np.ndarray
    max_lag: int

    def cross_at(self, lag: int) -> float:
        if abs(lag) > self.max_lag:
            return 0.0
        return float(self.cross[lag + self.max_lag])


def default_max_lag(
    model: SpectralModel,
    scheme: ObservationScheme,
    threshold: float = 1e-6,
    cap: int = 4096,
) -> int:
    """Smallest truncation lag at which every band's kernel envelope falls
    below ``threshold`` (relative to tau^2), capped for memory.

    The band kernels decay like 1/lag, so for realistic thresholds the cap
    binds; the truncation error is checked statistically by the simulator
    fidelity tests.
    """
    hard_cap = min(cap, scheme.n - 1)
    need = 1
    for c in model.components:
        if c.corr == 0.0:
            continue
        m = model.finest_level - c.level + 1
        beta = 2.0**m * model.tau
        # band term is 2^m R psi(beta (l - steps)) in units of tau^2, and
        # |psi(s)| <= 2 / (pi |s|)
        lag = abs(c.lag_steps) + 2.0 * 2.0**m * abs(c.corr) / (np.pi * beta * threshold)
        need = max(need, int(np.ceil(lag)))
    return max(1, min(need, hard_cap))


def target_covariance_tables(
    model: SpectralModel, scheme: ObservationScheme, max_lag: int
) -> CovarianceTables:
    """Tabulate the covariance targets for the embedding."""
    if max_lag >= scheme.n:
        raise DataError(
            f"covariance truncation lag {max_lag} must be smaller than n={scheme.n}"
        )
    if max_lag < 1:
        raise DataError(f"truncation lag must be >= 1, got {max_lag}")
    auto = np.zeros(max_lag + 1)
    auto[0] = scheme.tau
    lags = np.arange(-max_lag, max_lag + 1)
    cross = increment_cross_cov(model, lags, tau=scheme.tau)
    return CovarianceTables(auto1=auto, auto2=auto.copy(), cross=cross, max_lag=max_lag)


@dataclass(frozen=True)
class CirculantEmbedding:
    """Precomputed per-frequency factors, reusable across seeds."""

    n: int
    tau: float
    size: int
    factors: np.ndarray  # (size, 2, 2) complex, A A^H = spectral matrix
    clipped: int
    min_eigenvalue: float


def build_embedding(
    model: SpectralModel,
    scheme: ObservationScheme,
    max_lag: int | None = None,
) -> CirculantEmbedding:
    """Embed the block-Toeplitz target covariance into a circulant and factor
    each frequency's 2x2 spectral matrix.

    The circulant length is the next power of two at or above
    2 * (n + max_lag), which keeps the wrapped covariance exact for every
    lag the sample can see.
    """
    if max_lag is None:
        max_lag = default_max_lag(model, scheme)
    tables = target_covariance_tables(model, scheme, max_lag)
    n, tau = scheme.n, scheme.tau
    size = 1 << int(2 * (n + max_lag) - 1).bit_length()

    wrapped = np.zeros(size)
    wrapped[: max_lag + 1] = tables.cross[max_lag:]
    wrapped[size - max_lag :] = tables.cross[:max_lag]
    s12 = np.fft.fft(wrapped)

    mag = np.abs(s12)
    lam_minus = tau - mag
    lam_plus = tau + mag
    min_eig = float(lam_minus.min())
    if min_eig < -EIGENVALUE_FLOOR * tau:
        raise NumericError(
            f"invalid circulant embedding: eigenvalue {min_eig:.6e} below "
            f"-{EIGENVALUE_FLOOR:.0e} * tau; the model's implied spectrum "
            "exceeds the increment variance"
        )
    negative = lam_minus < 0.0
    clipped = int(np.count_nonzero(negative))
    if clipped:
        logger.warning(
            "clipped %d of %d spectral eigenvalues to zero (most negative %.3e, "
            "relative %.3e)",
            clipped,
            size,
            min_eig,
            min_eig / tau,
        )
        lam_minus = np.where(negative, 0.0, lam_minus)

    phase = np.where(mag > 0.0, s12 / np.where(mag > 0.0, mag, 1.0), 1.0)
    sqrt_plus = np.sqrt(lam_plus / 2.0)
    sqrt_minus = np.sqrt(lam_minus / 2.0)
    factors = np.empty((size, 2, 2), dtype=complex)
    factors[:, 0, 0] = sqrt_plus * phase
    factors[:, 0, 1] = -sqrt_minus * phase
    factors[:, 1, 0] = sqrt_plus
    factors[:, 1, 1] = sqrt_minus
    return CirculantEmbedding(
        n=n,
        tau=tau,
        size=size,
        factors=factors,
        clipped=clipped,
        min_eigenvalue=min_eig,
    )


def _seed_streams(seed: int):
    return np.random.SeedSequence(seed).spawn(3)


def apply_missing(scheme: ObservationScheme, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Independent Bernoulli missingness masks for the two series.

    Streams are derived from the same seed tree as the path noise, so masks
    drawn standalone agree with the ones inside circulant_embed_sample.
    """
    _, ss1, ss2 = _seed_streams(seed)
    masks = []
    for ss, p in ((ss1, scheme.pi1), (ss2, scheme.pi2)):
        rng = np.random.Generator(np.random.Philox(ss))
        mask = np.zeros(scheme.n + 1, dtype=bool)
        mask[1:] = rng.random(scheme.n) < p
        mask.setflags(write=False)
        masks.append(mask)
    return masks[0], masks[1]


def circulant_embed_sample(
    model: SpectralModel,
    scheme: ObservationScheme,
    seed: int,
    embedding: CirculantEmbedding | None = None,
) -> PathSample:
    """Draw one bivariate increment path plus missingness masks.

    Synthesis is the standard spectral route: independent standard complex
    Gaussians per frequency, colored by the factored spectral matrices,
    transformed back with one FFT; the real part carries the target
    covariance exactly (up to eigenvalue clipping).
    """
    if embedding is None:
        embedding = build_embedding(model, scheme)
    if embedding.n != scheme.n or embedding.tau != scheme.tau:
        raise DataError("embedding was built for a different sampling scheme")
    path_ss, _, _ = _seed_streams(seed)
    rng = np.random.Generator(np.random.Philox(path_ss))
    size = embedding.size
    noise = rng.standard_normal((size, 2)) + 1j * rng.standard_normal((size, 2))
    colored = np.einsum("kij,kj->ki", embedding.factors, noise)
    paths = np.fft.fft(colored, axis=0)[: scheme.n] / np.sqrt(size)
    returns = np.ascontiguousarray(paths.real.T)
    mask1, mask2 = apply_missing(scheme, seed)
    returns.setflags(write=False)
    return PathSample(
        returns1=returns[0],
        returns2=returns[1],
        mask1=mask1,
        mask2=mask2,
        seed=seed,
    )
