"""Line-of-sight channel synthesis, noise injection and the spatial spectrum."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    ArrayConfig,
    NearFieldParams,
    UserPosition,
    fresnel_lower_bound,
    params_from_position,
    sine_grid,
)

EXACT = "exact_spherical"
QUADRATIC = "quadratic"
FAR_FIELD = "far_field"

# Independent PRNG streams derived from one NoiseSpec seed.
SNAPSHOT_STREAM = 0
SWEEP_STREAM = 1


class FresnelViolation(ValueError):
    """User closer to the array than the radiating near-field bound."""


@dataclass(frozen=True, eq=False)
class ChannelVector:
    samples: np.ndarray
    model_tag: str
    gain: float = 1.0

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != 1:
            raise ValueError("channel samples must be one-dimensional")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size

    def with_samples(self, samples: np.ndarray, model_tag: str | None = None) -> "ChannelVector":
        return ChannelVector(samples, model_tag or self.model_tag, self.gain)


@dataclass(frozen=True)
class NoiseSpec:
    """Receiver noise setting.

    ``snr_db`` follows SNR = P_t N / sigma^2, so the per-antenna noise variance
    is ``P_t N / SNR``.  ``math.inf`` means noiseless.

    Noise draws come from numpy's PCG64 generator seeded through
    ``SeedSequence(seed, spawn_key=(stream, index))``; snapshot and sweep noise
    use separate streams so either can be replayed alone.
    """

    snr_db: float = math.inf
    tx_power: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.tx_power > 0:
            raise ValueError(f"tx_power must be positive, got {self.tx_power}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def noiseless(self) -> bool:
        return math.isinf(self.snr_db) and self.snr_db > 0

    @property
    def snr_linear(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    def noise_var(self, n_antennas: int) -> float:
        "Per-antenna noise variance sigma^2."
        if self.noiseless:
            return 0.0
        return self.tx_power * n_antennas / self.snr_linear

    def rng(self, stream: int, index: int = 0) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(stream, index))
        return np.random.Generator(np.random.PCG64(ss))


def complex_gaussian(rng: np.random.Generator, size: int, var: float) -> np.ndarray:
    "Circularly-symmetric complex Gaussian samples with E|w|^2 = var."
    w = rng.standard_normal((2, size))
    return math.sqrt(var / 2.0) * (w[0] + 1j * w[1])


def _path_difference(cfg: ArrayConfig, pos: UserPosition) -> np.ndarray:
    # |p - x_n| - |p| without cancellation
    x = cfg.positions
    r = pos.r
    dist = np.hypot(pos.x - x, pos.z)
    return (x * x - 2.0 * pos.x * x) / (dist + r)


def exact_channel(cfg: ArrayConfig, pos: UserPosition) -> ChannelVector:
    "Spherical-wave response exp(jk(|p - x_n| - |p|))."
    bound = fresnel_lower_bound(cfg)
    if pos.r < bound:
        raise FresnelViolation(f"radius {pos.r:.6g} m is inside the Fresnel bound {bound:.6g} m")
    return ChannelVector(np.exp(1j * cfg.wavenumber * _path_difference(cfg, pos)), EXACT)


def quadratic_phase(cfg: ArrayConfig, p1: float, p2: float) -> np.ndarray:
    x = cfg.positions
    return cfg.wavenumber * (0.5 * p1 * x * x + p2 * x)


def quadratic_channel(cfg: ArrayConfig, params: NearFieldParams) -> ChannelVector:
    "Fresnel approximation exp(jk(p1 x^2 / 2 + p2 x))."
    return ChannelVector(np.exp(1j * quadratic_phase(cfg, params.p1, params.p2)), QUADRATIC)


def far_field_channel(cfg: ArrayConfig, theta: float) -> ChannelVector:
    "Plane-wave response exp(-jk x_n sin(theta))."
    if not abs(theta) < math.pi / 2:
        raise ValueError(f"theta must lie in (-pi/2, pi/2), got {theta}")
    # Same expression as the quadratic model with p1 = 0 so the two agree bitwise.
    return ChannelVector(np.exp(1j * quadratic_phase(cfg, 0.0, -math.sin(theta))), FAR_FIELD)


def phase_error_quadratic(cfg: ArrayConfig, pos: UserPosition) -> float:
    "Largest per-antenna phase gap between the spherical and quadratic models."
    if pos.r <= 0:
        raise ValueError("radius must be positive")
    exact = cfg.wavenumber * _path_difference(cfg, pos)
    par = params_from_position(cfg, pos)
    return float(np.max(np.abs(exact - quadratic_phase(cfg, par.p1, par.p2))))


def add_noise(ch: ChannelVector, noise: NoiseSpec, index: int = 0) -> ChannelVector:
    """Raw array snapshot sqrt(P_t) h + w.

    ``index`` selects an independent snapshot from the same seed.
    """
    out = math.sqrt(noise.tx_power) * ch.samples
    var = noise.noise_var(len(ch))
    if var > 0:
        out = out + complex_gaussian(noise.rng(SNAPSHOT_STREAM, index), len(ch), var)
    return ch.with_samples(out)


def spatial_spectrum(cfg: ArrayConfig, ch: ChannelVector) -> np.ndarray:
    "Fourier-series magnitudes (1/N)|sum a_m[n] h[n]| over the N-point sine grid."
    if len(ch) != cfg.n_antennas:
        raise ValueError("channel length does not match the array")
    u = sine_grid(cfg.n_antennas)
    steer = np.exp(1j * cfg.wavenumber * np.outer(u, cfg.positions))
    return np.abs(steer @ ch.samples) / cfg.n_antennas
