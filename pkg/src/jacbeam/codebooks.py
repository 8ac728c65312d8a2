"""DFT, polar and JAC codebooks plus the shaping / de-shaping transform.

Codewords are stored as rows of a ``(K, N)`` matrix and applied with a plain
transpose contraction ``w^T h``; every conjugation needed for matched
filtering is baked into the weights.  Each weight has modulus exactly ``1/N``,
so a perfectly matched unit-modulus channel gives ``|w^T h| = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelVector
from .geometry import ArrayConfig, fresnel_lower_bound, sine_grid

DFT = "dft"
POLAR = "polar"
JAC = "jac"

MAX_CODEBOOK_ENTRIES = 2**28
"Upper limit on K * N complex weights held in one codebook (4 GiB)."

DEFAULT_POLAR_RINGS = 8


@dataclass(frozen=True)
class Codeword:
    weights: np.ndarray
    index: int
    ring: int
    u: float
    p1: float


@dataclass(frozen=True, eq=False)
class Codebook:
    """Ordered codewords with per-row labels.

    ``u`` is the sine-grid point each row steers to, ``p1`` the curvature it
    focuses on and ``ring`` the curvature ring (0 for DFT and JAC rows).
    ``overhead`` is the number of training slots the scheme costs.
    """

    weights: np.ndarray
    scheme: str
    overhead: int
    u: np.ndarray
    p1: np.ndarray
    ring: np.ndarray

    def __len__(self) -> int:
        return self.weights.shape[0]

    def __getitem__(self, i: int) -> Codeword:
        return Codeword(self.weights[i], int(i), int(self.ring[i]), float(self.u[i]), float(self.p1[i]))

    @property
    def n_antennas(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True, eq=False)
class ShapingVector:
    samples: np.ndarray
    p1: float


def _steering_rows(cfg: ArrayConfig) -> np.ndarray:
    u = sine_grid(cfg.n_antennas)
    return np.exp(1j * cfg.wavenumber * np.outer(u, cfg.positions)) / cfg.n_antennas


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def dft_codebook(cfg: ArrayConfig) -> Codebook:
    n = cfg.n_antennas
    return Codebook(
        _readonly(_steering_rows(cfg)),
        DFT,
        n,
        _readonly(sine_grid(n)),
        _readonly(np.zeros(n)),
        _readonly(np.zeros(n, dtype=int)),
    )


def shaping_vector(cfg: ArrayConfig, p1: float) -> ShapingVector:
    "Curvature-only phasor exp(jk p1 x^2 / 2)."
    if p1 < 0:
        raise ValueError(f"p1 must be nonnegative, got {p1}")
    x = cfg.positions
    return ShapingVector(np.exp(1j * cfg.wavenumber * (0.5 * p1 * x * x)), float(p1))


def jac_codebook(cfg: ArrayConfig, p1_hat: float) -> Codebook:
    """DFT rows focused on curvature ``p1_hat``.

    The conjugated shaping vector multiplies every DFT codeword.  One extra
    slot is charged for the autocorrelation snapshot.
    """
    n = cfg.n_antennas
    s = shaping_vector(cfg, p1_hat)
    weights = _steering_rows(cfg) * np.conj(s.samples)
    return Codebook(
        _readonly(weights),
        JAC,
        n + 1,
        _readonly(sine_grid(n)),
        _readonly(np.full(n, float(p1_hat))),
        _readonly(np.zeros(n, dtype=int)),
    )


def polar_rings(n_rings: int, p1_max: float) -> np.ndarray:
    "Curvature rings uniform in p1 from 0 to ``p1_max``."
    if n_rings == 1:
        return np.zeros(1)
    return np.linspace(0.0, p1_max, n_rings)


def polar_codebook(cfg: ArrayConfig, n_rings: int = DEFAULT_POLAR_RINGS, p1_max: float | None = None) -> Codebook:
    """Angle x curvature grid with ``n_rings`` rings per DFT angle.

    Rows are ring-major: block ``s`` holds all N angles at ring ``s``.
    ``p1_max`` defaults to the curvature of a broadside user at the Fresnel
    bound.
    """
    n = cfg.n_antennas
    if n_rings < 1:
        raise ValueError(f"n_rings must be >= 1, got {n_rings}")
    if p1_max is None:
        p1_max = 1.0 / fresnel_lower_bound(cfg)
    if not p1_max > 0:
        raise ValueError(f"p1_max must be positive, got {p1_max}")
    if n_rings * n * n > MAX_CODEBOOK_ENTRIES:
        raise OverflowError(f"polar codebook of {n_rings} x {n} codewords exceeds the size limit")
    rings = polar_rings(n_rings, p1_max)
    steer = _steering_rows(cfg)
    weights = np.concatenate([steer * np.conj(shaping_vector(cfg, p).samples) for p in rings])
    return Codebook(
        _readonly(weights),
        POLAR,
        n_rings * n,
        _readonly(np.tile(sine_grid(n), n_rings)),
        _readonly(np.repeat(rings, n)),
        _readonly(np.repeat(np.arange(n_rings), n)),
    )


def de_shape(cfg: ArrayConfig, ch: ChannelVector, p1_hat: float) -> ChannelVector:
    "Strip curvature ``p1_hat`` from a channel, leaving its planar tangent."
    if len(ch) != cfg.n_antennas:
        raise ValueError("channel length does not match the array")
    return ch.with_samples(ch.samples * np.conj(shaping_vector(cfg, p1_hat).samples))


def re_shape(cfg: ArrayConfig, ch: ChannelVector, p1: float) -> ChannelVector:
    "Inverse of :func:`de_shape`."
    return ch.with_samples(ch.samples * shaping_vector(cfg, p1).samples)
