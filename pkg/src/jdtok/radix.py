"""Mixed-radix packing of per-dimension indices into integer tokens.

A group of G digits with per-position radices (r_1, ..., r_G) packs into

    token = sum_k  i_k * prod_{j > k} r_j

with the first digit most significant, so lexicographic order on digit
tuples equals numeric order on tokens and the map is a bijection onto
[0, prod r).  Unpacking is repeated divmod.  Radix-1 positions carry no
information (their only digit is 0) and serve as padding when the dimension
count is not a multiple of the group size.

Everything here is exact integer arithmetic; the vectorized frame paths use
uint64, and scheme construction rejects group products beyond 2**64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .fsq import FsqLevels

__all__ = [
    "RadixScheme",
    "TokenStream",
    "build_scheme",
    "pack_group",
    "unpack_group",
    "pack_frame",
    "unpack_frame",
    "pack_frames",
    "unpack_frames",
    "token_rate",
]

MAX_GROUP_PRODUCT = 1 << 64


@dataclass(frozen=True)
class RadixScheme:
    """Grouping of per-dimension radices into packable token groups.

    ``radices`` holds one radix per real dimension; the final group is padded
    with radix-1 dimensions up to a multiple of ``group_size``.  Derived
    fields give the padded layout and per-group vocabularies.
    """

    radices: tuple[int, ...]
    group_size: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "radices", tuple(int(r) for r in self.radices))
        if self.group_size < 1:
            raise ValueError(f"group_size must be >= 1, got {self.group_size}")
        if len(self.radices) < 1:
            raise ValueError("need at least one dimension")
        if any(r < 1 for r in self.radices):
            raise ValueError(f"all radices must be >= 1, got {self.radices}")
        for g, start in enumerate(range(0, len(self.padded_radices), self.group_size)):
            prod = math.prod(self.padded_radices[start : start + self.group_size])
            if prod > MAX_GROUP_PRODUCT:
                raise ValueError(
                    f"group {g} product {prod} exceeds 2**64; use a smaller group size"
                )

    @property
    def dim(self) -> int:
        return len(self.radices)

    @property
    def group_count(self) -> int:
        return -(-self.dim // self.group_size)

    @property
    def pad_count(self) -> int:
        return self.group_count * self.group_size - self.dim

    @property
    def padded_radices(self) -> tuple[int, ...]:
        return self.radices + (1,) * self.pad_count

    @property
    def group_radices(self) -> tuple[tuple[int, ...], ...]:
        padded = self.padded_radices
        g = self.group_size
        return tuple(padded[i : i + g] for i in range(0, len(padded), g))

    @property
    def group_products(self) -> tuple[int, ...]:
        return tuple(math.prod(group) for group in self.group_radices)


def build_scheme(levels, group_size: int = 7) -> RadixScheme:
    """Derive the packing scheme from quantizer levels (radix = level count)."""
    if isinstance(levels, FsqLevels):
        radices = levels.levels
    else:
        radices = tuple(levels)
    return RadixScheme(radices=radices, group_size=group_size)


@dataclass(frozen=True)
class TokenStream:
    """A [frames, groups] block of packed tokens plus its scheme and rate."""

    tokens: np.ndarray
    scheme: RadixScheme
    frame_rate_hz: float

    def __post_init__(self) -> None:
        tokens = np.asarray(self.tokens, dtype=np.uint64)
        if tokens.ndim != 2:
            raise ValueError(f"tokens must be [frames, groups], got shape {tokens.shape}")
        if tokens.shape[1] != self.scheme.group_count:
            raise ValueError(
                f"token columns ({tokens.shape[1]}) != scheme group count "
                f"({self.scheme.group_count})"
            )
        products = np.array(self.scheme.group_products, dtype=np.uint64)
        bad = tokens >= products[None, :]
        if np.any(bad):
            f, g = np.argwhere(bad)[0]
            raise ValidationError(
                f"token {tokens[f, g]} at frame {f}, group {g} exceeds the group "
                f"vocabulary {self.scheme.group_products[g]}"
            )
        object.__setattr__(self, "tokens", tokens)

    @property
    def frame_count(self) -> int:
        return self.tokens.shape[0]

    @property
    def tokens_per_second(self) -> float:
        return self.frame_rate_hz * self.scheme.group_count


def pack_group(indices, radices) -> int:
    """Pack one digit tuple into a token, first digit most significant."""
    indices = list(indices)
    radices = list(radices)
    if len(indices) != len(radices):
        raise ValueError(
            f"digit count ({len(indices)}) != radix count ({len(radices)})"
        )
    token = 0
    for pos, (i, r) in enumerate(zip(indices, radices)):
        if not 0 <= i < r:
            raise ValidationError(
                f"digit {i} at position {pos} out of range for radix {r}"
            )
        token = token * r + i
    return token


def unpack_group(token: int, radices) -> list[int]:
    """Invert :func:`pack_group` exactly."""
    radices = list(radices)
    prod = math.prod(radices)
    if not 0 <= token < prod:
        raise ValidationError(f"token {token} out of range [0, {prod})")
    digits = [0] * len(radices)
    rem = int(token)
    for pos in range(len(radices) - 1, -1, -1):
        rem, digits[pos] = divmod(rem, radices[pos])
    return digits


def pack_frame(indices, scheme: RadixScheme) -> list[int]:
    """Pack one frame of D per-dimension indices into group tokens."""
    indices = list(indices)
    if len(indices) != scheme.dim:
        raise ValueError(f"expected {scheme.dim} indices, got {len(indices)}")
    padded = indices + [0] * scheme.pad_count
    g = scheme.group_size
    return [
        pack_group(padded[i : i + g], group)
        for i, group in zip(range(0, len(padded), g), scheme.group_radices)
    ]


def unpack_frame(tokens, scheme: RadixScheme) -> list[int]:
    """Invert :func:`pack_frame`, dropping the pad digits."""
    tokens = list(tokens)
    if len(tokens) != scheme.group_count:
        raise ValueError(f"expected {scheme.group_count} tokens, got {len(tokens)}")
    digits: list[int] = []
    for token, group in zip(tokens, scheme.group_radices):
        digits.extend(unpack_group(token, group))
    return digits[: scheme.dim]


def pack_frames(indices: np.ndarray, scheme: RadixScheme) -> np.ndarray:
    """Vectorized :func:`pack_frame` over a [frames, D] index array."""
    indices = np.asarray(indices, dtype=np.int64)
    if indices.ndim != 2 or indices.shape[1] != scheme.dim:
        raise ValueError(
            f"expected a [frames, {scheme.dim}] index array, got shape {indices.shape}"
        )
    radices = np.array(scheme.padded_radices, dtype=np.uint64).reshape(
        scheme.group_count, scheme.group_size
    )
    hi = np.array(scheme.radices, dtype=np.int64)
    bad = (indices < 0) | (indices >= hi)
    if np.any(bad):
        f, d = np.argwhere(bad)[0]
        raise ValidationError(
            f"digit {indices[f, d]} at frame {f}, dimension {d} out of range "
            f"for radix {scheme.radices[d]}"
        )
    padded = np.zeros((indices.shape[0], scheme.group_count * scheme.group_size), dtype=np.uint64)
    padded[:, : scheme.dim] = indices
    padded = padded.reshape(indices.shape[0], scheme.group_count, scheme.group_size)
    tokens = np.zeros((indices.shape[0], scheme.group_count), dtype=np.uint64)
    for pos in range(scheme.group_size):
        tokens = tokens * radices[None, :, pos] + padded[:, :, pos]
    return tokens


def unpack_frames(tokens: np.ndarray, scheme: RadixScheme) -> np.ndarray:
    """Vectorized :func:`unpack_frame` over a [frames, groups] token array."""
    tokens = np.asarray(tokens, dtype=np.uint64)
    if tokens.ndim != 2 or tokens.shape[1] != scheme.group_count:
        raise ValueError(
            f"expected a [frames, {scheme.group_count}] token array, got shape {tokens.shape}"
        )
    products = np.array(scheme.group_products, dtype=np.uint64)
    bad = tokens >= products[None, :]
    if np.any(bad):
        f, g = np.argwhere(bad)[0]
        raise ValidationError(
            f"token {tokens[f, g]} at frame {f}, group {g} exceeds the group "
            f"vocabulary {scheme.group_products[g]}"
        )
    radices = np.array(scheme.padded_radices, dtype=np.uint64).reshape(
        scheme.group_count, scheme.group_size
    )
    rem = tokens.copy()
    digits = np.zeros(
        (tokens.shape[0], scheme.group_count, scheme.group_size), dtype=np.uint64
    )
    for pos in range(scheme.group_size - 1, -1, -1):
        digits[:, :, pos] = rem % radices[None, :, pos]
        rem //= radices[None, :, pos]
    flat = digits.reshape(tokens.shape[0], -1)[:, : scheme.dim]
    return flat.astype(np.int64)


def token_rate(sample_rate: float, hop: int, groups: int) -> tuple[float, float]:
    """Frame rate (Hz) and packed tokens per second for an encoder hop.

    The frame rate is sample_rate / hop; each frame emits one token per
    group.
    """
    if hop < 1:
        raise ValueError(f"hop must be >= 1, got {hop}")
    if sample_rate < 1:
        raise ValueError(f"sample_rate must be >= 1, got {sample_rate}")
    frame_rate = sample_rate / hop
    return frame_rate, frame_rate * groups
