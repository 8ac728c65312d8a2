"""Curvature-of-arrival (p1) estimation from one array snapshot.

The lag products ``r[n] conj(r[n + nu])`` of a quadratic-phase channel lose
the linear phase ``p2`` entirely, and what is left is a linear phase ramp of
step ``k p1 nu d^2`` over ``N - nu`` samples.  The magnitude of the lag sum is
therefore a Dirichlet kernel, and the first lag at which the normalised
autocorrelation falls to a threshold ``eta`` pins down ``p1`` through the
inverse of that kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import ChannelVector
from .geometry import ArrayConfig


class EstimatorError(ValueError):
    """Snapshot cannot yield a curvature estimate."""


class BracketError(EstimatorError):
    """The lag window ended while the autocorrelation was still falling."""


@dataclass(frozen=True)
class EstimatorConfig:
    """Threshold estimator settings.

    eta
        Normalised-autocorrelation level that defines the coherent lag.
    nu_max
        Largest lag computed; ``None`` means ``N - 1``.  Crossings are only
        searched up to ``N // 2`` because the kernel argument peaks there.
    far_field_floor
        If set, a snapshot whose normalised autocorrelation never drops to
        this level is declared far-field even when it touches ``eta``.
    snapshots
        Number of snapshots averaged into the lag sums (each costs one slot).
    reference_passes
        Fixed-point refinements of the zero-lag reference level.
    """

    eta: float = 0.5
    nu_max: int | None = None
    far_field_floor: float | None = None
    snapshots: int = 1
    reference_passes: int = 3

    def __post_init__(self) -> None:
        if not 0 < self.eta < 1:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")
        if self.far_field_floor is not None and not 0 < self.far_field_floor <= self.eta:
            raise ValueError("far_field_floor must lie in (0, eta]")
        if self.snapshots < 1:
            raise ValueError("snapshots must be >= 1")
        if self.reference_passes < 0:
            raise ValueError("reference_passes must be >= 0")


@dataclass(frozen=True, eq=False)
class AutocorrSequence:
    "Lag-sum magnitudes ``values[nu - 1]`` for nu = 1..nu_max."

    values: np.ndarray
    n_antennas: int

    @property
    def lags(self) -> np.ndarray:
        return np.arange(1, self.values.size + 1)

    @property
    def normalized(self) -> np.ndarray:
        return self.values / (self.n_antennas - self.lags)


@dataclass(frozen=True)
class CoaEstimate:
    p1_hat: float
    crossing_lag: int | None
    kernel_root: float | None
    fractional_lag: float | None = None


def _snapshot_matrix(r: ChannelVector | Sequence[ChannelVector] | np.ndarray) -> np.ndarray:
    if isinstance(r, ChannelVector):
        return r.samples[None, :]
    if isinstance(r, np.ndarray):
        return np.atleast_2d(r)
    return np.stack([c.samples for c in r])


def autocorrelation(r: ChannelVector | Sequence[ChannelVector], nu_max: int | None = None) -> AutocorrSequence:
    """Spatial autocorrelation magnitudes ``|sum_n r[n] conj(r[n + nu])|``.

    Several snapshots are combined by averaging the complex lag sums.
    """
    x = _snapshot_matrix(r)
    n = x.shape[1]
    if nu_max is None:
        nu_max = n - 1
    if not 1 <= nu_max <= n - 1:
        raise ValueError(f"nu_max must lie in 1..{n - 1}, got {nu_max}")
    sums = np.empty(nu_max, dtype=complex)
    for nu in range(1, nu_max + 1):
        sums[nu - 1] = np.sum(x[:, :-nu] * np.conj(x[:, nu:])) / x.shape[0]
    return AutocorrSequence(np.abs(sums), n)


def dirichlet_kernel(m: float, phi: float | np.ndarray) -> float | np.ndarray:
    """``|sin(m phi / 2) / sin(phi / 2)|`` with the value ``m`` at phi = 0 mod 2 pi.

    Non-integer ``m`` is accepted; it arises from fractional lags.
    """
    if m < 1:
        raise ValueError(f"kernel length must be >= 1, got {m}")
    phi = np.asarray(phi, dtype=float)
    half = np.sin(phi / 2.0)
    tiny = np.abs(half) < 1e-12
    safe = np.where(tiny, 1.0, half)
    out = np.where(tiny, float(m), np.abs(np.sin(m * phi / 2.0) / safe))
    return float(out) if out.ndim == 0 else out


def invert_kernel(m: float, eta: float, rtol: float = 1e-12) -> float:
    """Main-lobe argument phi0 in (0, 2 pi / m) with kernel(m, phi0) / m = eta.

    The normalised kernel falls monotonically from 1 to 0 across the main
    lobe, so plain bisection converges to the unique root.
    """
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    lo, hi = 0.0, 2.0 * math.pi / m
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if dirichlet_kernel(m, mid) / m > eta:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def model_normalized(cfg: ArrayConfig, p1: float, lags: np.ndarray) -> np.ndarray:
    "Noiseless normalised autocorrelation of a unit-gain quadratic channel."
    lags = np.asarray(lags, dtype=float)
    m = cfg.n_antennas - lags
    phi = cfg.wavenumber * p1 * lags * cfg.spacing**2
    half = np.sin(phi / 2.0)
    tiny = np.abs(half) < 1e-12
    ratio = np.abs(np.sin(m * phi / 2.0) / np.where(tiny, 1.0, half)) / m
    return np.where(tiny, 1.0, ratio)


def _crossing(ratio: np.ndarray, eta: float) -> int | None:
    below = np.flatnonzero(ratio <= eta)
    return None if below.size == 0 else int(below[0])


def estimate_p1(
    r: ChannelVector | Sequence[ChannelVector],
    cfg: ArrayConfig,
    est: EstimatorConfig = EstimatorConfig(),
) -> CoaEstimate:
    """Threshold estimate of the curvature ``p1`` from raw snapshot(s).

    The normalised autocorrelation is divided by a reference level taken from
    lag 1, the first lag where it falls to ``eta`` is located and refined by
    linear interpolation, and the kernel is inverted at the matching window
    length.  The lag-1 reference is itself slightly below the zero-lag level
    once ``p1 > 0``; it is corrected with the model value at the current
    estimate for ``est.reference_passes`` rounds.

    No crossing means the curvature is below the array's resolution and the
    user is declared far-field (``p1_hat = 0``).
    """
    n = cfg.n_antennas
    if n < 4:
        raise EstimatorError("snapshot needs at least 4 antennas")
    x = _snapshot_matrix(r)
    if x.shape[1] != n:
        raise ValueError("snapshot length does not match the array")
    if not np.any(x):
        raise EstimatorError("degenerate snapshot: all samples are zero")

    nu_max = n - 1 if est.nu_max is None else est.nu_max
    search = min(nu_max, n // 2)
    acf = autocorrelation(x, search)
    a = acf.normalized
    if a[0] == 0:
        raise EstimatorError("degenerate snapshot: zero lag-1 autocorrelation")

    floor_hit = est.far_field_floor is None or np.min(a / a[0]) <= est.far_field_floor
    k, d2 = cfg.wavenumber, cfg.spacing**2
    ref = a[0]
    p1_hat = 0.0
    result: CoaEstimate | None = None
    for _ in range(est.reference_passes + 1):
        ratio = a / ref
        i = _crossing(ratio, est.eta) if floor_hit else None
        if i is None or i == 0:
            result = None
            break
        # ratio[i - 1] > eta >= ratio[i]; lags are i and i + 1
        frac = i + (ratio[i - 1] - est.eta) / (ratio[i - 1] - ratio[i])
        phi0 = invert_kernel(n - frac, est.eta)
        p1_hat = phi0 / (k * frac * d2)
        result = CoaEstimate(p1_hat, i + 1, phi0, frac)
        new_ref = a[0] / model_normalized(cfg, p1_hat, np.array([1.0]))[0]
        if new_ref == ref:
            break
        ref = new_ref

    if result is None:
        if search < n // 2 and search >= 2 and a[-1] < a[-2]:
            raise BracketError(
                f"autocorrelation still falling at nu_max={search}; increase nu_max to bracket eta={est.eta}"
            )
        return CoaEstimate(0.0, None, None, None)
    return result


def oracle_p1(
    r: ChannelVector | Sequence[ChannelVector],
    cfg: ArrayConfig,
    grid: Sequence[float] | np.ndarray,
    nu_max: int | None = None,
) -> float:
    """Brute-force least-squares fit of the closed-form autocorrelation.

    The fit is done on squared lag-sum magnitudes, where independent noise
    adds a floor proportional to the overlap length ``N - nu``.  For each
    grid value the model ``g D(nu)^2 + c (N - nu)`` is fitted linearly in the
    unknown gain ``g`` and floor ``c``, and the grid value with the smallest
    residual wins.  Lags run 1..``nu_max`` (default N/2).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid < 0):
        raise ValueError("grid must be nonempty and nonnegative")
    n = cfg.n_antennas
    nu_max = n // 2 if nu_max is None else nu_max
    acf = autocorrelation(r, nu_max)
    y = acf.values**2
    overlap = (n - acf.lags).astype(float)
    best, best_cost = float(grid[0]), math.inf
    for p1 in grid:
        basis = np.stack([(model_normalized(cfg, p1, acf.lags) * overlap) ** 2, overlap], axis=1)
        coef = np.linalg.lstsq(basis, y, rcond=None)[0]
        cost = float(np.sum((basis @ coef - y) ** 2))
        if cost < best_cost:
            best, best_cost = float(p1), cost
    return best
