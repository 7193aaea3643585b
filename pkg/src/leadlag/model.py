"""Multi-scale cross-spectral model for a pair of Brownian log-price drivers.

Each dyadic frequency band carries a correlation strength and a time lag;
level 1 is the finest band resolvable on the sampling grid. The module also
provides the closed-form kernels of the estimator's large-sample limit
(discretization kernel, interpolation kernel, volatility weight) used as
numeric test oracles throughout the suite.
"""

from __future__ import annotations

import cmath
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DataError, NumericError

MODEL_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ScaleComponent:
    """One band of the cross spectrum: level j, correlation, lag in grid steps."""

    level: int
    corr: float
    lag_steps: float


@dataclass(frozen=True)
class SpectralModel:
    """Piecewise cross-spectral density over dyadic bands.

    ``finest_level`` is the dyadic depth J of the sampling grid; the grid
    spacing in model time is 2^(-J-1). Components live on levels 1..J+1
    (level j occupies the band (pi/2^j, pi/2^(j-1)] in grid-step frequency);
    missing levels have zero correlation. ``abs(corr) <= 1`` keeps the
    density admissible (its modulus can never exceed 1 because the bands
    are disjoint).
    """

    finest_level: int
    components: tuple[ScaleComponent, ...]

    def __post_init__(self):
        if self.finest_level < 1:
            raise DataError(f"finest level must be >= 1, got {self.finest_level}")
        seen = set()
        for c in self.components:
            if not 1 <= c.level <= self.finest_level + 1:
                raise DataError(
                    f"component level {c.level} outside 1..{self.finest_level + 1}"
                )
            if c.level in seen:
                raise DataError(f"duplicate component for level {c.level}")
            seen.add(c.level)
            if not abs(c.corr) <= 1:
                raise DataError(
                    f"band correlation at level {c.level} is {c.corr}, "
                    "admissibility requires |corr| <= 1"
                )

    @property
    def tau(self) -> float:
        """Grid spacing in model time units, 2^(-J-1)."""
        return 2.0 ** -(self.finest_level + 1)

    def corr(self, level: int) -> float:
        for c in self.components:
            if c.level == level:
                return c.corr
        return 0.0

    def lag_steps(self, level: int) -> float:
        for c in self.components:
            if c.level == level:
                return c.lag_steps
        return 0.0

    def active_levels(self) -> list[int]:
        return sorted(c.level for c in self.components if c.corr != 0.0)


@dataclass(frozen=True)
class ObservationScheme:
    """Sampling grid: spacing in seconds, increment count, missing probabilities."""

    tau: float
    n: int
    pi1: float = 0.0
    pi2: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise DataError(f"need at least one increment, got n={self.n}")
        if self.tau <= 0:
            raise DataError(f"grid spacing must be positive, got {self.tau}")
        for name, p in (("pi1", self.pi1), ("pi2", self.pi2)):
            if not 0.0 <= p < 1.0:
                raise DataError(f"missing probability {name}={p} outside [0, 1)")


def load_model(source) -> tuple[SpectralModel, ObservationScheme]:
    """Load a model + sampling scheme from a JSON file path or a parsed dict.

    Expected fields: J, levels: [{j, R, theta_over_tau | theta_seconds}],
    and optionally tau (seconds per grid step, default 2^(-J-1)), n, pi1, pi2.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "read"):
        try:
            if hasattr(source, "read"):
                raw = json.load(source)
            else:
                with open(source, "r", encoding="utf-8") as fh:
                    raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read model file: {exc}") from exc
    else:
        raw = source
    if not isinstance(raw, dict):
        raise DataError("model JSON must be an object")
    try:
        J = int(raw["J"])
    except (KeyError, TypeError, ValueError):
        raise DataError("model JSON needs an integer field 'J'")
    tau = float(raw.get("tau", 2.0 ** -(J + 1)))
    components = []
    for entry in raw.get("levels", []):
        try:
            j = int(entry["j"])
            r = float(entry["R"])
        except (KeyError, TypeError, ValueError):
            raise DataError(f"bad level entry {entry!r}: needs fields 'j' and 'R'")
        if "theta_over_tau" in entry:
            steps = float(entry["theta_over_tau"])
        elif "theta_seconds" in entry:
            steps = float(entry["theta_seconds"]) / tau
        else:
            steps = 0.0
        components.append(ScaleComponent(level=j, corr=r, lag_steps=steps))
    model = SpectralModel(finest_level=J, components=tuple(components))
    scheme = ObservationScheme(
        tau=tau,
        n=int(raw.get("n", 1)),
        pi1=float(raw.get("pi1", 0.0)),
        pi2=float(raw.get("pi2", 0.0)),
    )
    return model, scheme


def lp_scaling(s):
    """Band-limited scaling kernel sin(pi s) / (pi s), with value 1 at 0."""
    return np.sinc(np.asarray(s, dtype=float))


def lp_wavelet(s):
    """Band-limited wavelet kernel 2 sinc(2s) - sinc(s); transform is the
    indicator of the octave (pi, 2 pi]."""
    s = np.asarray(s, dtype=float)
    return 2.0 * np.sinc(2.0 * s) - np.sinc(s)


def cross_spectral_density(model: SpectralModel, lam):
    """Evaluate the piecewise cross-spectral density at angular frequency lam.

    Frequencies are in radians per model time unit; the level-j component
    occupies +-(2^m pi, 2^(m+1) pi] with m = J - j + 1. Returns 0 outside
    all bands (lam = 0 included).
    """
    lam = np.asarray(lam, dtype=float)
    scalar = lam.ndim == 0
    lam = np.atleast_1d(lam)
    out = np.zeros(lam.shape, dtype=complex)
    mag = np.abs(lam)
    nz = mag > 0
    if np.any(nz):
        ratio = mag[nz] / math.pi
        edge = np.log2(ratio)
        m = np.floor(edge).astype(int)
        on_edge = 2.0**m * math.pi == mag[nz]
        m = np.where(on_edge, m - 1, m)  # bands are open at the inner edge
        level = model.finest_level - m + 1
        vals = np.zeros(level.shape, dtype=complex)
        for c in model.components:
            sel = level == c.level
            if np.any(sel):
                theta = c.lag_steps * model.tau
                vals[sel] = c.corr * np.exp(-1j * theta * lam[nz][sel])
        out[nz] = vals
    return out[0] if scalar else out


def increment_cross_cov(model: SpectralModel, lag, tau: float | None = None):
    """Cross-covariance of unit-step increments of the two drivers.

    Band m contributes 2^m tau_c^2 R psi(2^m tau_c (l - lag_steps)) with
    tau_c the model grid spacing; the whole sum is rescaled linearly when a
    physical seconds-per-step ``tau`` different from tau_c is requested.
    Variances are exactly ``tau`` per step, so each band's implied spectrum
    is tau * R on the band and admissibility |R| <= 1 keeps it bounded.
    """
    tau_c = model.tau
    if tau is None:
        tau = tau_c
    lag = np.asarray(lag, dtype=float)
    scalar = lag.ndim == 0
    lag = np.atleast_1d(lag)
    out = np.zeros(lag.shape)
    for c in model.components:
        m = model.finest_level - c.level + 1
        beta = 2.0**m * tau_c  # dimensionless band scale, <= 1/2
        out += beta * c.corr * lp_wavelet(beta * (lag - c.lag_steps))
    out *= tau
    return float(out[0]) if scalar else out


def discretization_kernel(lam):
    """Kernel (2/pi) sin^2(lam/2) / lam^2 capturing increment discretization;
    continuous at 0 with value 1/(2 pi) and unit integral over the line."""
    lam = np.asarray(lam, dtype=float)
    scalar = lam.ndim == 0
    lam = np.atleast_1d(lam)
    out = np.full(lam.shape, 1.0 / (2.0 * math.pi))
    nz = lam != 0.0
    out[nz] = (2.0 / math.pi) * np.sin(lam[nz] / 2.0) ** 2 / lam[nz] ** 2
    return float(out[0]) if scalar else out


def interpolation_kernel(lam, pi1: float, pi2: float):
    """Frequency response of previous-tick interpolation under Bernoulli
    missingness: (1-pi1)(1-pi2) / ((1-pi1 e^(i lam))(1-pi2 e^(-i lam)))."""
    lam = np.asarray(lam, dtype=float)
    scalar = lam.ndim == 0
    z = np.exp(1j * np.atleast_1d(lam))
    out = (1.0 - pi1) * (1.0 - pi2) / ((1.0 - pi1 * z) * (1.0 - pi2 * np.conj(z)))
    return complex(out[0]) if scalar else out


def sigma_weight(theta: float, sigma1, sigma2, horizon: float, t: float | None = None) -> float:
    """Volatility overlap weight of the limit constant.

    For theta >= 0 this is (1/(T-theta)) * int_0^((t-theta)+) s1(u) s2(u+theta) du,
    mirrored for negative theta. ``sigma1``/``sigma2`` are callables of time.
    """
    if t is None:
        t = horizon
    if horizon - abs(theta) <= 0:
        raise DataError(f"lag {theta} is not smaller than the horizon {horizon}")
    if theta >= 0:
        upper = max(t - theta, 0.0)
        if upper == 0.0:
            return 0.0
        val, _ = integrate.quad(lambda u: sigma1(u) * sigma2(u + theta), 0.0, upper)
        return val / (horizon - theta)
    upper = max(t + theta, 0.0)
    if upper == 0.0:
        return 0.0
    val, _ = integrate.quad(lambda u: sigma1(u - theta) * sigma2(u), 0.0, upper)
    return val / (horizon + theta)


def _band_quad(func, lo: float, hi: float) -> complex:
    re, _ = integrate.quad(lambda x: func(x).real, lo, hi, epsabs=1e-9, limit=200)
    im, _ = integrate.quad(lambda x: func(x).imag, lo, hi, epsabs=1e-9, limit=200)
    return complex(re, im)


def limit_constant(
    level: int,
    b: float,
    pi1: float,
    pi2: float,
    corr: float,
    sigma_value: float,
) -> float:
    """Large-sample value of the cross-covariance estimator near the true lag.

    2^j * sigma_value * corr * int over +-(pi/2^j, pi/2^(j-1)] of
    D(lam) Pi(lam) e^(i b lam) d lam, evaluated by adaptive quadrature on
    the two symmetric band halves. The integrand is hermitian, so the
    imaginary part must cancel; anything above 1e-9 is a numerical failure.
    """
    if level < 1:
        raise DataError(f"level must be >= 1, got {level}")
    if abs(b) > 0.5:
        warnings.warn(
            f"grid offset b={b} is outside [-1/2, 1/2]; the limit is only "
            "guaranteed nonzero inside that range",
            stacklevel=2,
        )

    def integrand(lam):
        return (
            discretization_kernel(lam)
            * interpolation_kernel(lam, pi1, pi2)
            * cmath.exp(1j * b * lam)
        )

    lo, hi = math.pi / 2.0**level, math.pi / 2.0 ** (level - 1)
    total = _band_quad(integrand, lo, hi) + _band_quad(integrand, -hi, -lo)
    if abs(total.imag) > 1e-9:
        raise NumericError(
            f"band integral has non-cancelling imaginary part {total.imag:.3e}"
        )
    return 2.0**level * sigma_value * corr * total.real
