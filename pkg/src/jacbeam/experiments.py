"""Achievable-rate, coverage and overhead experiments.

Heatmap windows use the figure layout of the coverage plots: ``x`` is the
range measured along broadside (away from the array face) and ``z`` the
offset along the aperture.  A heatmap point ``(x, z)`` is therefore the user
position ``UserPosition(x=z, z=x)`` in array coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .channel import ChannelVector, NoiseSpec, add_noise, exact_channel
from .coa import EstimatorConfig, estimate_p1
from .codebooks import DFT, JAC, POLAR, Codebook, dft_codebook, polar_codebook, shaping_vector
from .geometry import ArrayConfig, UserPosition, fresnel_lower_bound
from .training import TrainingResult, jac_train, sweep

SCHEMES = (DFT, POLAR, JAC)
UPPER_BOUND = "upper_bound"

_TRIAL_STREAM = 2
_USER_STREAM = 3


class ValidationError(ValueError):
    """Experiment settings outside the model's region of validity."""


@dataclass(frozen=True)
class ExperimentSpec:
    schemes: tuple[str, ...] = SCHEMES
    snr_db: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    user_count: int = 100
    r_min: float = 5.0
    r_max: float = 100.0
    theta_min: float = -math.pi / 3
    theta_max: float = math.pi / 3
    x_min: float = 100.0
    x_max: float = 200.0
    z_min: float = -50.0
    z_max: float = 50.0
    step: float = 2.0
    seed: int = 0
    n_antennas: int = 800
    carrier_freq: float = 60e9
    spacing: float | None = None
    tx_power: float = 1.0
    eta: float = 0.5
    nu_max: int | None = None
    snapshots: int = 1
    polar_rings: int = 8
    polar_p1_max: float | None = None
    clamp_radius: bool = True

    def __post_init__(self) -> None:
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown:
            raise ValueError(f"unknown scheme(s): {', '.join(sorted(unknown))}")
        if self.user_count < 1:
            raise ValueError("user_count must be >= 1")
        if not 0 < self.r_min < self.r_max:
            raise ValueError("need 0 < r_min < r_max")
        if not -math.pi / 2 < self.theta_min <= self.theta_max < math.pi / 2:
            raise ValueError("theta range must lie inside (-pi/2, pi/2)")
        if not (self.x_min < self.x_max and self.z_min < self.z_max and self.step > 0):
            raise ValueError("heatmap window needs x_min < x_max, z_min < z_max and step > 0")

    @property
    def array(self) -> ArrayConfig:
        if self.spacing is None:
            return ArrayConfig.half_wavelength(self.n_antennas, self.carrier_freq)
        return ArrayConfig(self.n_antennas, self.spacing, self.carrier_freq)

    @property
    def estimator(self) -> EstimatorConfig:
        return EstimatorConfig(eta=self.eta, nu_max=self.nu_max, snapshots=self.snapshots)

    def radius_range(self) -> tuple[float, float, list[str]]:
        "Effective (r_min, r_max) after applying the Fresnel bound, with notes."
        bound = fresnel_lower_bound(self.array)
        if self.r_min >= bound:
            return self.r_min, self.r_max, []
        if not self.clamp_radius:
            raise ValidationError(
                f"r_min={self.r_min:g} m is inside the Fresnel bound {bound:.6g} m and clamp_radius is false"
            )
        if bound >= self.r_max:
            raise ValidationError(f"r_max={self.r_max:g} m does not exceed the Fresnel bound {bound:.6g} m")
        return bound, self.r_max, [f"r_min clamped from {self.r_min:.17g} to Fresnel bound {bound:.17g} m"]


@dataclass(frozen=True, eq=False)
class ResultRecord:
    scheme: str
    snr_db: float
    mean_rate: float
    ci95: float
    slots_used: int
    rate_samples: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class CoverageGrid:
    "R_cover per scheme on a heatmap window; ``r_cover[scheme]`` has shape (len(x), len(z))."

    x: np.ndarray
    z: np.ndarray
    r_cover: dict[str, np.ndarray]
    notes: tuple[str, ...] = ()


def achievable_rate(best_power: float | np.ndarray, snr_db: float) -> float | np.ndarray:
    "log2(1 + SNR |w^T h|^2) with SNR = P_t N / sigma^2."
    snr = 10.0 ** (snr_db / 10.0)
    return np.log2(1.0 + snr * np.asarray(best_power))


def trial_seed(seed: int, snr_index: int, user_index: int) -> int:
    ss = np.random.SeedSequence(seed, spawn_key=(_TRIAL_STREAM, snr_index, user_index))
    return int(ss.generate_state(1, np.uint64)[0])


def draw_users(spec: ExperimentSpec) -> list[UserPosition]:
    r_min, r_max, _ = spec.radius_range()
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(spec.seed, spawn_key=(_USER_STREAM,))))
    r = rng.uniform(r_min, r_max, spec.user_count)
    theta = rng.uniform(spec.theta_min, spec.theta_max, spec.user_count)
    return [UserPosition.from_polar(float(a), float(b)) for a, b in zip(r, theta)]


def make_codebooks(spec: ExperimentSpec) -> dict[str, Codebook]:
    "Fixed codebooks used by the sweep-only schemes."
    cfg = spec.array
    books = {}
    if DFT in spec.schemes:
        books[DFT] = dft_codebook(cfg)
    if POLAR in spec.schemes:
        books[POLAR] = polar_codebook(cfg, spec.polar_rings, spec.polar_p1_max)
    return books


def train(scheme: str, h: ChannelVector, spec: ExperimentSpec, noise: NoiseSpec, books: dict[str, Codebook]) -> TrainingResult:
    if scheme == JAC:
        snaps = [add_noise(h, noise, i) for i in range(spec.snapshots)]
        return jac_train(snaps, h, spec.array, spec.estimator, noise)
    return sweep(h, books[scheme], noise)


def rate_vs_snr(spec: ExperimentSpec, users: Sequence[UserPosition] | None = None) -> tuple[list[ResultRecord], list[str]]:
    """Mean achievable rate per scheme and SNR over random users.

    Users are shared across schemes and SNR points, and every (SNR, user)
    pair draws its noise from one seed that all schemes reuse.  Passing
    ``users`` replaces the random draw.  Returns the records, including an
    upper-bound row per SNR, and metadata notes.
    """
    cfg = spec.array
    _, _, notes = spec.radius_range()
    if users is None:
        users = draw_users(spec)
    channels = [exact_channel(cfg, p) for p in users]
    books = make_codebooks(spec)
    records = []
    for si, snr in enumerate(spec.snr_db):
        records.append(ResultRecord(UPPER_BOUND, snr, float(achievable_rate(1.0, snr)), 0.0, 0, np.full(len(users), achievable_rate(1.0, snr))))
        for scheme in spec.schemes:
            powers = np.empty(len(users))
            slots = 0
            for ui, h in enumerate(channels):
                noise = NoiseSpec(snr, spec.tx_power, trial_seed(spec.seed, si, ui))
                res = train(scheme, h, spec, noise, books)
                powers[ui] = res.true_power
                slots = res.slots_used
            rates = achievable_rate(powers, snr)
            ci = 1.96 * float(np.std(rates, ddof=1)) / math.sqrt(rates.size) if rates.size > 1 else 0.0
            records.append(ResultRecord(scheme, snr, float(np.mean(rates)), ci, slots, rates))
    return records, notes


def heatmap_axes(spec: ExperimentSpec) -> tuple[np.ndarray, np.ndarray]:
    "Cell centres of the heatmap window at the configured step."
    nx = int(math.floor((spec.x_max - spec.x_min) / spec.step + 1e-9))
    nz = int(math.floor((spec.z_max - spec.z_min) / spec.step + 1e-9))
    x = spec.x_min + spec.step * (np.arange(nx) + 0.5)
    z = spec.z_min + spec.step * (np.arange(nz) + 0.5)
    return x, z


def _max_power(weights: np.ndarray, chans: np.ndarray, chunk: int = 256) -> np.ndarray:
    "max_k |w_k^T h|^2 for every row of ``chans``."
    out = np.empty(chans.shape[0])
    for i in range(0, chans.shape[0], chunk):
        out[i:i + chunk] = np.max(np.abs(chans[i:i + chunk] @ weights.T) ** 2, axis=1)
    return out


def coverage_heatmap(spec: ExperimentSpec) -> CoverageGrid:
    """Noiseless coverage N max_k |w_k^T h(p)|^2 over the heatmap window.

    JAC estimates p1 from the clean snapshot at every point before sweeping.
    Points inside the Fresnel bound are rejected, or reported as NaN when
    ``clamp_radius`` is set.
    """
    cfg = spec.array
    n = cfg.n_antennas
    xs, zs = heatmap_axes(spec)
    bound = fresnel_lower_bound(cfg)
    points = [(i, j, UserPosition(float(z), float(x))) for i, x in enumerate(xs) for j, z in enumerate(zs)]
    inside = [p for p in points if p[2].r < bound]
    notes: list[str] = []
    if inside:
        if not spec.clamp_radius:
            raise ValidationError(f"{len(inside)} heatmap points lie inside the Fresnel bound {bound:.6g} m")
        notes.append(f"{len(inside)} points inside the Fresnel bound {bound:.17g} m reported as nan")
        points = [p for p in points if p[2].r >= bound]
    chans = np.stack([exact_channel(cfg, p[2]).samples for p in points]) if points else np.empty((0, n), complex)
    books = make_codebooks(spec)
    result = {}
    for scheme in spec.schemes:
        if scheme == JAC:
            est = spec.estimator
            focused = np.empty_like(chans)
            for row, h in enumerate(chans):
                p1 = estimate_p1(ChannelVector(h, "exact_spherical"), cfg, est).p1_hat
                focused[row] = h * np.conj(shaping_vector(cfg, p1).samples)
            cover = n * _max_power(dft_codebook(cfg).weights, focused)
        else:
            cover = n * _max_power(books[scheme].weights, chans)
        grid = np.full((xs.size, zs.size), np.nan)
        for (i, j, _), v in zip(points, cover):
            grid[i, j] = v
        result[scheme] = grid
    return CoverageGrid(xs, zs, result, tuple(notes))


def overhead_table(spec: ExperimentSpec) -> list[tuple[str, int]]:
    """Training slots per scheme, read from an instrumented noiseless run.

    The probe user sits at broadside, midway through the radius range.
    """
    cfg = spec.array
    r_min, r_max, _ = replace(spec, clamp_radius=True).radius_range()
    h = exact_channel(cfg, UserPosition(0.0, 0.5 * (r_min + r_max)))
    books = make_codebooks(spec)
    noiseless = NoiseSpec(math.inf, spec.tx_power, spec.seed)
    return [(scheme, train(scheme, h, spec, noiseless, books).slots_used) for scheme in spec.schemes]
