"""Finite scalar quantization onto fixed per-dimension lattices.

Each dimension d carries L_d levels placed at (2i - L_d + 1) / L_d for
i in {0, ..., L_d - 1}: a uniform lattice inside (-1, 1), symmetric about
zero.  Raw features are squashed through tanh and snapped to the nearest
lattice point, so there is no codebook to learn and every code is a plain
integer per dimension.

``quantize_projected`` skips the tanh and operates on already-bounded values;
it is the entry point for re-quantizing dequantized lattice values, for which
it is exactly idempotent.  Ties at lattice midpoints break toward the lower
index, deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "FsqLevels",
    "fsq_boundaries",
    "fsq_quantize",
    "quantize_projected",
    "fsq_dequantize",
    "straight_through",
]

_CHUNK = 4096  # time-axis chunk for the distance matrix


@dataclass(frozen=True)
class FsqLevels:
    """Per-dimension level counts. Default: 128 dimensions of 4 levels."""

    levels: tuple[int, ...] = (4,) * 128

    def __post_init__(self) -> None:
        object.__setattr__(self, "levels", tuple(int(v) for v in self.levels))
        if len(self.levels) < 1:
            raise ValueError("need at least one dimension")
        if any(v < 1 for v in self.levels):
            raise ValueError(f"all levels must be >= 1, got {self.levels}")

    @property
    def dim(self) -> int:
        return len(self.levels)


def _as_levels(levels) -> FsqLevels:
    if isinstance(levels, FsqLevels):
        return levels
    return FsqLevels(tuple(levels))


def fsq_boundaries(level: int) -> np.ndarray:
    """The sorted lattice for one dimension with ``level`` levels."""
    if level < 1:
        raise ValueError(f"level must be >= 1, got {level}")
    return (2.0 * np.arange(level) - level + 1) / level


def _boundary_matrix(levels: FsqLevels) -> np.ndarray:
    # [D, Lmax], padded with +inf so padded slots never win the argmin
    lmax = max(levels.levels)
    mat = np.full((levels.dim, lmax), np.inf)
    for d, ld in enumerate(levels.levels):
        mat[d, :ld] = fsq_boundaries(ld)
    return mat


def quantize_projected(
    values: np.ndarray, levels
) -> tuple[np.ndarray, np.ndarray]:
    """Snap already-bounded [D, T] values to the nearest lattice point.

    No tanh is applied.  Returns (indices, lattice values); ties break toward
    the lower index.  Lattice points are fixed points: quantizing the output
    values again reproduces the indices exactly.
    """
    levels = _as_levels(levels)
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError(f"expected a [D, T] array, got shape {values.shape}")
    if values.shape[0] != levels.dim:
        raise ValueError(
            f"dimension mismatch: array has {values.shape[0]} rows, "
            f"levels define {levels.dim} dimensions"
        )
    if not np.all(np.isfinite(values)):
        raise ValueError("input contains non-finite values")

    bmat = _boundary_matrix(levels)
    t = values.shape[1]
    indices = np.empty(values.shape, dtype=np.int64)
    for lo in range(0, t, _CHUNK):
        hi = min(lo + _CHUNK, t)
        dist = np.abs(values[:, lo:hi, None] - bmat[:, None, :])
        # np.argmin returns the first minimum, which is the lower index
        indices[:, lo:hi] = np.argmin(dist, axis=2)
    quantized = np.take_along_axis(bmat, indices, axis=1)
    return indices, quantized


def fsq_quantize(z: np.ndarray, levels) -> tuple[np.ndarray, np.ndarray]:
    """Project raw [D, T] features through tanh and quantize to the lattice.

    Returns (indices, quantized values).
    """
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise ValueError("input contains non-finite values")
    return quantize_projected(np.tanh(z), levels)


def fsq_dequantize(indices: np.ndarray, levels) -> np.ndarray:
    """Map [D, T] lattice indices back to their lattice values."""
    levels = _as_levels(levels)
    indices = np.asarray(indices)
    if indices.ndim != 2:
        raise ValueError(f"expected a [D, T] index array, got shape {indices.shape}")
    if indices.shape[0] != levels.dim:
        raise ValueError(
            f"dimension mismatch: array has {indices.shape[0]} rows, "
            f"levels define {levels.dim} dimensions"
        )
    lvl = np.asarray(levels.levels)[:, None]
    bad = (indices < 0) | (indices >= lvl)
    if np.any(bad):
        d, t = np.argwhere(bad)[0]
        raise ValidationError(
            f"index {indices[d, t]} out of range for dimension {d} "
            f"(level {levels.levels[d]}) at frame {t}"
        )
    return (2.0 * indices - lvl + 1) / lvl


def straight_through(grad_downstream: np.ndarray) -> np.ndarray:
    """Training-time gradient contract: pass the downstream gradient through.

    The quantizer is treated as identity in the backward pass (the gradient
    with respect to the pre-quantization values equals the gradient with
    respect to the quantized values, at the post-tanh point).
    """
    return np.asarray(grad_downstream)
