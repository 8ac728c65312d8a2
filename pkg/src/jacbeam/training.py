"""Codebook sweeps and the two-stage JAC training pipeline."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import SWEEP_STREAM, ChannelVector, NoiseSpec, complex_gaussian
from .coa import EstimatorConfig, estimate_p1
from .codebooks import Codebook, Codeword, jac_codebook
from .geometry import ArrayConfig


@dataclass(frozen=True, eq=False)
class TrainingResult:
    """Outcome of one training run.

    ``best_power`` is the largest *measured* power; ``true_power`` is the
    noiseless ``|w^T h|^2`` of the codeword that won, which is what the link
    actually gets.
    """

    best_index: int
    best_power: float
    true_power: float
    slots_used: int
    p1_hat: float | None = None
    per_codeword_power: np.ndarray | None = None


def matched_filter_power(ch: ChannelVector, w: Codeword | np.ndarray) -> float:
    "|sum_n w[n] h[n]|^2."
    weights = w.weights if isinstance(w, Codeword) else np.asarray(w)
    if weights.shape != ch.samples.shape:
        raise ValueError(f"codeword length {weights.shape} does not match channel {ch.samples.shape}")
    return float(abs(np.dot(weights, ch.samples)) ** 2)


def sweep(ch_clean: ChannelVector, codebook: Codebook, noise: NoiseSpec = NoiseSpec(), keep_powers: bool = False) -> TrainingResult:
    """Measure every codeword once and keep the strongest.

    Each slot sees ``|w^T sqrt(P_t) h + v|^2`` with ``v`` complex Gaussian of
    variance ``sigma^2 / N`` (noise after combining with a ``1/N`` codeword).
    Ties go to the lowest index.
    """
    if len(codebook) == 0:
        raise ValueError("empty codebook")
    if codebook.n_antennas != len(ch_clean):
        raise ValueError(f"codebook has {codebook.n_antennas} antennas, channel has {len(ch_clean)}")
    clean = codebook.weights @ ch_clean.samples
    y = math.sqrt(noise.tx_power) * clean
    var = noise.noise_var(len(ch_clean))
    if var > 0:
        y = y + complex_gaussian(noise.rng(SWEEP_STREAM), y.size, var / len(ch_clean))
    powers = np.abs(y) ** 2
    best = int(np.argmax(powers))
    return TrainingResult(
        best_index=best,
        best_power=float(powers[best]),
        true_power=float(abs(clean[best]) ** 2),
        slots_used=int(powers.size),
        per_codeword_power=powers if keep_powers else None,
    )


def jac_train(
    snapshot: ChannelVector | Sequence[ChannelVector],
    ch_clean: ChannelVector,
    cfg: ArrayConfig,
    est: EstimatorConfig = EstimatorConfig(),
    noise: NoiseSpec = NoiseSpec(),
    keep_powers: bool = False,
) -> TrainingResult:
    """Estimate curvature from the snapshot, then sweep the focused DFT codebook.

    Every snapshot consumed costs one slot, so a single snapshot gives N + 1.
    """
    snaps = [snapshot] if isinstance(snapshot, ChannelVector) else list(snapshot)
    estimate = estimate_p1(snaps, cfg, est)
    res = sweep(ch_clean, jac_codebook(cfg, estimate.p1_hat), noise, keep_powers)
    return TrainingResult(
        best_index=res.best_index,
        best_power=res.best_power,
        true_power=res.true_power,
        slots_used=len(snaps) + res.slots_used,
        p1_hat=estimate.p1_hat,
        per_codeword_power=res.per_codeword_power,
    )
