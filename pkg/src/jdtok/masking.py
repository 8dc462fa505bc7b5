"""Block-structured temporal masking for masked-prediction pretraining.

A mask is a {0,1} vector over frames: 1 marks visible (context) frames,
0 marks masked (target) frames.  Contiguous spans of zeros are placed at
random positions until the requested fraction of the timeline is covered,
which forces downstream predictors to model long-range structure instead of
interpolating single frames.

All randomness comes from numpy's PCG64 generator, so masks are reproducible
bit-for-bit across platforms given (frame count, config, seed).  Batched
generation derives one independent PCG64 substream per row via
``numpy.random.SeedSequence.spawn``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

__all__ = [
    "MaskConfig",
    "generate_block_mask",
    "generate_block_masks",
    "masked_fraction",
]


@dataclass(frozen=True)
class MaskConfig:
    """Hyperparameters of the block-mask distribution.

    Attributes:
        mask_ratio: target fraction of frames to mask, in [0, 1].  The
            generated mask covers at least ``floor(mask_ratio * T)`` frames
            and overshoots that target by at most span_min - 1.
        span_min: minimum span length in frames (>= 1).
        span_max: maximum span length in frames, or None for the adaptive
            rule ``T // 4`` (never below span_min, so short sequences stay
            maskable).
        seed: 64-bit seed for the pseudorandom source.
    """

    mask_ratio: float = 0.5
    span_min: int = 2
    span_max: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.mask_ratio <= 1.0:
            raise ConfigError(f"mask_ratio must be in [0, 1], got {self.mask_ratio}")
        if self.span_min < 1:
            raise ConfigError(f"span_min must be >= 1, got {self.span_min}")
        if self.span_max is not None and self.span_max < self.span_min:
            raise ConfigError(
                f"span_max ({self.span_max}) must be >= span_min ({self.span_min})"
            )

    def resolved_span_max(self, num_frames: int) -> int:
        """Concrete maximum span for a sequence of ``num_frames`` frames."""
        if self.span_max is None:
            return max(self.span_min, num_frames // 4)
        return self.span_max


def generate_block_mask(
    num_frames: int,
    cfg: MaskConfig,
    rng: np.random.Generator | None = None,
    *,
    count_overlaps: bool = False,
) -> np.ndarray:
    """Sample one block mask of length ``num_frames``.

    Spans are drawn until the number of masked frames reaches
    ``floor(mask_ratio * num_frames)``: span length uniform on
    {span_min, ..., min(span_max, T)}, start position uniform on
    {0, ..., T - length}, both ends inclusive.  By default the progress
    counter only counts newly masked frames, which guarantees the target is
    met even when spans overlap, and the applied span is clipped to the
    remaining need (never below span_min) so the target is overshot by at
    most span_min - 1 frames and the mean masked fraction stays tight to
    mask_ratio.  With ``count_overlaps=True`` the loop instead runs the
    legacy literal form (exposed on the CLI as --compat-paper-mask-counter):
    full spans are applied unclipped and the counter adds the whole span
    length regardless of overlap, so the final mask can undershoot the
    target.

    Args:
        num_frames: sequence length T >= 1.
        cfg: mask distribution parameters.
        rng: optional generator; defaults to ``PCG64(cfg.seed)``.
        count_overlaps: use the legacy span-length counter.

    Returns:
        uint8 array of shape (T,) with 1 = visible, 0 = masked.
    """
    if num_frames < 1:
        raise ConfigError(f"num_frames must be >= 1, got {num_frames}")
    target = math.floor(cfg.mask_ratio * num_frames)
    mask = np.ones(num_frames, dtype=np.uint8)
    if target == 0:
        return mask
    if cfg.span_min > num_frames:
        raise ConfigError(
            f"span_min ({cfg.span_min}) exceeds sequence length ({num_frames})"
        )
    span_max = min(cfg.resolved_span_max(num_frames), num_frames)
    if span_max < cfg.span_min:
        raise ConfigError(
            f"resolved span_max ({span_max}) fell below span_min ({cfg.span_min})"
        )
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(cfg.seed))

    masked = 0
    while masked < target:
        length = int(rng.integers(cfg.span_min, span_max + 1))
        start = int(rng.integers(0, num_frames - length + 1))
        if count_overlaps:
            end = min(start + length, num_frames)
            masked += end - start
        else:
            length = min(length, max(target - masked, cfg.span_min))
            end = min(start + length, num_frames)
            masked += int(np.count_nonzero(mask[start:end]))
        mask[start:end] = 0
    return mask


def generate_block_masks(
    batch: int,
    num_frames: int,
    cfg: MaskConfig,
    *,
    count_overlaps: bool = False,
) -> np.ndarray:
    """Generate a (batch, T) stack of masks, one independent substream per row."""
    if batch < 1:
        raise ConfigError(f"batch must be >= 1, got {batch}")
    children = np.random.SeedSequence(cfg.seed).spawn(batch)
    rows = [
        generate_block_mask(
            num_frames,
            cfg,
            np.random.Generator(np.random.PCG64(child)),
            count_overlaps=count_overlaps,
        )
        for child in children
    ]
    return np.stack(rows)


def masked_fraction(mask: np.ndarray) -> float:
    """Fraction of masked (zero) entries in a mask vector."""
    mask = np.asarray(mask)
    if mask.size == 0:
        raise ValueError("mask must be non-empty")
    return float(np.count_nonzero(mask == 0) / mask.size)
