"""Training and evaluation losses.

Stage 1 exposes the masked latent MSE (prediction scored only on masked
frames, targets treated as constants).  Stage 2 exposes waveform L1, a
multi-resolution STFT loss (spectral convergence plus log-magnitude L1 at
five FFT sizes), and least-squares GAN reductions computed as pure functions
of caller-supplied discriminator outputs.  Nothing here owns a network; all
functions are stateless reductions over arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

__all__ = [
    "StftConfig",
    "DiscriminatorOutputs",
    "GanLosses",
    "jepa_masked_mse",
    "l1_loss",
    "stft_magnitude",
    "spectral_convergence",
    "log_magnitude_l1",
    "multi_res_stft",
    "gan_losses",
    "total_stage2",
]

DEFAULT_LAMBDA_STFT = 2.0
DEFAULT_LAMBDA_GAN = 0.1


@dataclass(frozen=True)
class StftConfig:
    """Multi-resolution STFT settings: five FFT sizes with 4x overlap."""

    fft_sizes: tuple[int, ...] = (2048, 1024, 512, 256, 128)
    hop_sizes: tuple[int, ...] = (512, 256, 128, 64, 32)
    magnitude_floor: float = 1e-7

    def __post_init__(self) -> None:
        if len(self.fft_sizes) != len(self.hop_sizes):
            raise ValueError("fft_sizes and hop_sizes must have equal length")
        if any(n < 1 for n in self.fft_sizes) or any(h < 1 for h in self.hop_sizes):
            raise ValueError("fft and hop sizes must be positive")
        if any(h > n for n, h in zip(self.fft_sizes, self.hop_sizes)):
            raise ValueError("hop size must not exceed fft size")
        if self.magnitude_floor <= 0:
            raise ValueError("magnitude_floor must be > 0")


def jepa_masked_mse(pred: np.ndarray, target: np.ndarray, mask: np.ndarray) -> float:
    """Mean squared error over masked frames only.

    ``pred`` and ``target`` are [C, T]; ``mask`` is the {0,1} frame mask with
    0 marking masked (scored) positions.  The result is the squared error
    summed over masked frames and channels, divided by (masked count * C).
    Visible frames never enter the computation, so perturbing them leaves the
    loss bit-identical; the target is treated as a constant (stop-gradient
    contract), so no gradient with respect to it is ever defined here.
    """
    pred = np.atleast_2d(np.asarray(pred, dtype=np.float64))
    target = np.atleast_2d(np.asarray(target, dtype=np.float64))
    mask = np.asarray(mask)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: pred {pred.shape} vs target {target.shape}")
    if mask.ndim != 1 or mask.shape[0] != pred.shape[1]:
        raise ValueError(
            f"mask length {mask.shape} does not match time axis {pred.shape[1]}"
        )
    masked = mask == 0
    n_mask = int(np.count_nonzero(masked))
    if n_mask == 0:
        raise ValueError("empty mask set: no masked positions to score")
    diff = pred[:, masked] - target[:, masked]
    return float(np.sum(diff * diff) / (n_mask * pred.shape[0]))


def l1_loss(x_hat: np.ndarray, x: np.ndarray) -> float:
    """Mean absolute sample error between two equal-length waveforms."""
    x_hat = np.asarray(x_hat, dtype=np.float64).ravel()
    x = np.asarray(x, dtype=np.float64).ravel()
    if x_hat.shape != x.shape:
        raise ValueError(f"length mismatch: {x_hat.shape[0]} vs {x.shape[0]}")
    if x.size == 0:
        raise ValueError("empty waveform")
    return float(np.mean(np.abs(x_hat - x)))


def _hann_periodic(n: int) -> np.ndarray:
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def _resolve_window(window, fft_size: int) -> np.ndarray:
    if isinstance(window, str):
        if window == "hann":
            return _hann_periodic(fft_size)
        if window in ("rect", "rectangular"):
            return np.ones(fft_size)
        raise ValueError(f"unknown window {window!r}")
    window = np.asarray(window, dtype=np.float64)
    if window.shape != (fft_size,):
        raise ValueError(f"window length {window.shape} != fft size {fft_size}")
    return window


def stft_magnitude(
    x: np.ndarray, fft_size: int, hop: int, window="hann"
) -> np.ndarray:
    """Magnitude spectrogram [bins, frames] of a 1-D waveform.

    Frames are centered (reflect padding by fft_size // 2 on both ends) and
    hopped by ``hop``; bins = fft_size // 2 + 1.  ``window`` is "hann"
    (periodic, the default), "rect", or an explicit length-fft_size array.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size < fft_size:
        raise ValueError(
            f"input of {x.size} samples is shorter than the fft size {fft_size}"
        )
    win = _resolve_window(window, fft_size)
    pad = fft_size // 2
    padded = np.pad(x, pad, mode="reflect")
    frames = np.lib.stride_tricks.sliding_window_view(padded, fft_size)[::hop]
    spec = np.fft.rfft(frames * win[None, :], axis=1)
    return np.abs(spec).T


def spectral_convergence(s_ref: np.ndarray, s_hat: np.ndarray) -> float:
    """Relative Frobenius error ||s_hat - s_ref||_F / ||s_ref||_F."""
    s_ref = np.asarray(s_ref, dtype=np.float64)
    s_hat = np.asarray(s_hat, dtype=np.float64)
    if s_ref.shape != s_hat.shape:
        raise ValueError(f"shape mismatch: {s_ref.shape} vs {s_hat.shape}")
    den = np.linalg.norm(s_ref)
    if den == 0.0:
        raise ValueError("reference magnitudes are all zero (silent reference)")
    return float(np.linalg.norm(s_hat - s_ref) / den)


def log_magnitude_l1(
    s_ref: np.ndarray,
    s_hat: np.ndarray,
    floor: float = 1e-7,
    num_elements: int | None = None,
) -> float:
    """Mean absolute log-magnitude difference, floored before the log.

    ``num_elements`` defaults to the element count of the magnitude tensor.
    """
    s_ref = np.asarray(s_ref, dtype=np.float64)
    s_hat = np.asarray(s_hat, dtype=np.float64)
    if s_ref.shape != s_hat.shape:
        raise ValueError(f"shape mismatch: {s_ref.shape} vs {s_hat.shape}")
    if num_elements is None:
        num_elements = s_ref.size
    diff = np.log(np.maximum(s_hat, floor)) - np.log(np.maximum(s_ref, floor))
    return float(np.sum(np.abs(diff)) / num_elements)


def multi_res_stft(
    x_hat: np.ndarray, x: np.ndarray, cfg: StftConfig = StftConfig()
) -> tuple[float, list[tuple[float, float]]]:
    """Sum of spectral-convergence and log-magnitude losses over resolutions.

    Returns (total, per-resolution list of (sc, log_mag) pairs).  Both
    waveforms must have equal length of at least the largest FFT size.
    """
    x_hat = np.asarray(x_hat, dtype=np.float64).ravel()
    x = np.asarray(x, dtype=np.float64).ravel()
    if x_hat.shape != x.shape:
        raise ValueError(f"length mismatch: {x_hat.shape[0]} vs {x.shape[0]}")
    per_resolution: list[tuple[float, float]] = []
    total = 0.0
    for fft_size, hop in zip(cfg.fft_sizes, cfg.hop_sizes):
        s_ref = stft_magnitude(x, fft_size, hop)
        s_hat = stft_magnitude(x_hat, fft_size, hop)
        sc = spectral_convergence(s_ref, s_hat)
        mag = log_magnitude_l1(s_ref, s_hat, floor=cfg.magnitude_floor)
        per_resolution.append((sc, mag))
        total += sc + mag
    return total, per_resolution


@dataclass(frozen=True)
class DiscriminatorOutputs:
    """Scores and per-layer features from a bank of discriminators.

    ``scores[d]`` is discriminator d's score tensor; ``features[d][l]`` is
    its layer-l feature tensor.  Real and generated passes must produce
    matching structures.
    """

    scores: list[np.ndarray]
    features: list[list[np.ndarray]] = field(default_factory=list)


class GanLosses(NamedTuple):
    generator: float
    feature_matching: float
    discriminator: float


def _check_structures(real: DiscriminatorOutputs, fake: DiscriminatorOutputs) -> None:
    if len(real.scores) != len(fake.scores):
        raise ValueError(
            f"discriminator count mismatch: {len(real.scores)} vs {len(fake.scores)}"
        )
    for d, (r, f) in enumerate(zip(real.scores, fake.scores)):
        if np.shape(r) != np.shape(f):
            raise ValueError(f"score shape mismatch at discriminator {d}")
    if len(real.features) != len(fake.features):
        raise ValueError("feature structure mismatch between real and fake outputs")
    for d, (rl, fl) in enumerate(zip(real.features, fake.features)):
        if len(rl) != len(fl):
            raise ValueError(f"layer count mismatch at discriminator {d}")
        for layer, (r, f) in enumerate(zip(rl, fl)):
            if np.shape(r) != np.shape(f):
                raise ValueError(
                    f"feature shape mismatch at discriminator {d}, layer {layer}"
                )


def gan_losses(real: DiscriminatorOutputs, fake: DiscriminatorOutputs) -> GanLosses:
    """Least-squares GAN reductions over supplied discriminator outputs.

    generator:         sum_d mean((D_d(fake) - 1)^2)
    feature_matching:  sum_d sum_l mean(|D_d^l(real) - D_d^l(fake)|)
    discriminator:     sum_d [mean((D_d(real) - 1)^2) + mean(D_d(fake)^2)]

    Expectations are realized as arithmetic means over each tensor's
    elements and summed across discriminators (and layers).
    """
    _check_structures(real, fake)
    gen = 0.0
    disc = 0.0
    for r, f in zip(real.scores, fake.scores):
        r = np.asarray(r, dtype=np.float64)
        f = np.asarray(f, dtype=np.float64)
        gen += float(np.mean((f - 1.0) ** 2))
        disc += float(np.mean((r - 1.0) ** 2) + np.mean(f**2))
    feat = 0.0
    for rl, fl in zip(real.features, fake.features):
        for r, f in zip(rl, fl):
            r = np.asarray(r, dtype=np.float64)
            f = np.asarray(f, dtype=np.float64)
            feat += float(np.mean(np.abs(r - f)))
    return GanLosses(generator=gen, feature_matching=feat, discriminator=disc)


def total_stage2(
    l_rec: float,
    l_stft: float,
    l_gan: float = 0.0,
    lambda_stft: float = DEFAULT_LAMBDA_STFT,
    lambda_gan: float = DEFAULT_LAMBDA_GAN,
) -> float:
    """Weighted stage-2 objective: l_rec + lambda_stft*l_stft + lambda_gan*l_gan.

    ``l_gan`` is the generator-side total (adversarial + feature matching).
    """
    return l_rec + lambda_stft * l_stft + lambda_gan * l_gan
