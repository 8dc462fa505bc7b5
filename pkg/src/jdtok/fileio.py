"""Binary containers for feature streams and packed token streams.

Both formats are little-endian with fixed headers, so identical inputs
produce identical bytes on every platform.

Feature file (magic ``JDF1``), also used for mono waveforms with channels=1
and frame_rate_hz carrying the sample rate:

    offset  size  field
    0       4     magic "JDF1"
    4       4     u32 format version (1)
    8       4     u32 channel count C
    12      8     u64 frame count T
    20      8     f64 frame_rate_hz
    28      4*C*T f32 payload, channel-major (all of channel 0, then 1, ...)

Token file (magic ``JDT1``):

    offset  size  field
    0       4     magic "JDT1"
    4       4     u32 format version (1)
    8       4     u32 group count
    12      4     u32 group size G
    16      4     u32 dimension count D
    20      4     u32 token width in bits (16 or 32)
    24      8     u64 frame count
    32      8     f64 frame_rate_hz
    40      2*D   u16 per-dimension radices
    ...           frames x groups unsigned tokens of the declared width

The token width is 16 when every group vocabulary fits in 2**16, else 32;
larger vocabularies are not serializable.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import FormatError, ValidationError
from .radix import RadixScheme, TokenStream

__all__ = [
    "FEATURE_MAGIC",
    "TOKEN_MAGIC",
    "FORMAT_VERSION",
    "read_feature_file",
    "write_feature_file",
    "read_token_file",
    "write_token_file",
    "write_mask_file",
]

FEATURE_MAGIC = b"JDF1"
TOKEN_MAGIC = b"JDT1"
FORMAT_VERSION = 1

_FEATURE_HEADER = struct.Struct("<4sIIQd")
_TOKEN_HEADER = struct.Struct("<4sIIIIIQd")


def write_feature_file(path, data: np.ndarray, frame_rate_hz: float) -> None:
    """Write a [C, T] float array as a feature file."""
    data = np.asarray(data, dtype=np.float32)
    if data.ndim != 2:
        raise ValueError(f"expected a [C, T] array, got shape {data.shape}")
    header = _FEATURE_HEADER.pack(
        FEATURE_MAGIC, FORMAT_VERSION, data.shape[0], data.shape[1], float(frame_rate_hz)
    )
    payload = np.ascontiguousarray(data).astype("<f4").tobytes()
    Path(path).write_bytes(header + payload)


def read_feature_file(path) -> tuple[np.ndarray, float]:
    """Read a feature file back to ([C, T] float32 array, frame_rate_hz)."""
    raw = Path(path).read_bytes()
    if len(raw) < _FEATURE_HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, channels, frames, frame_rate = _FEATURE_HEADER.unpack_from(raw)
    if magic != FEATURE_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {FEATURE_MAGIC!r}")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    expected = _FEATURE_HEADER.size + 4 * channels * frames
    if len(raw) != expected:
        raise FormatError(
            f"{path}: payload size {len(raw) - _FEATURE_HEADER.size} does not match "
            f"header ({channels} x {frames} float32)"
        )
    payload = np.frombuffer(raw, dtype="<f4", offset=_FEATURE_HEADER.size)
    return payload.reshape(channels, frames).copy(), frame_rate


def write_token_file(path, stream: TokenStream) -> None:
    """Write a token stream; width is the smallest of u16/u32 that fits."""
    scheme = stream.scheme
    if any(r > 0xFFFF for r in scheme.radices):
        raise FormatError(
            f"radices above {0xFFFF} are not serializable (got {max(scheme.radices)})"
        )
    max_product = max(scheme.group_products)
    if max_product <= 1 << 16:
        width, dtype = 16, "<u2"
    elif max_product <= 1 << 32:
        width, dtype = 32, "<u4"
    else:
        raise FormatError(
            f"group vocabulary {max_product} exceeds the 32-bit token width"
        )
    header = _TOKEN_HEADER.pack(
        TOKEN_MAGIC,
        FORMAT_VERSION,
        scheme.group_count,
        scheme.group_size,
        scheme.dim,
        width,
        stream.frame_count,
        float(stream.frame_rate_hz),
    )
    radices = np.array(scheme.radices, dtype="<u2").tobytes()
    payload = stream.tokens.astype(dtype).tobytes()
    Path(path).write_bytes(header + radices + payload)


def read_token_file(path) -> TokenStream:
    """Read a token file and revalidate every token against its vocabulary."""
    raw = Path(path).read_bytes()
    if len(raw) < _TOKEN_HEADER.size:
        raise FormatError(f"{path}: truncated header")
    (
        magic,
        version,
        group_count,
        group_size,
        dim,
        width,
        frames,
        frame_rate,
    ) = _TOKEN_HEADER.unpack_from(raw)
    if magic != TOKEN_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {TOKEN_MAGIC!r}")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if width not in (16, 32):
        raise FormatError(f"{path}: invalid token width {width}")
    offset = _TOKEN_HEADER.size
    if len(raw) < offset + 2 * dim:
        raise FormatError(f"{path}: truncated radix table")
    radices = np.frombuffer(raw, dtype="<u2", count=dim, offset=offset)
    offset += 2 * dim
    try:
        scheme = RadixScheme(radices=tuple(int(r) for r in radices), group_size=group_size)
    except ValueError as exc:
        raise FormatError(f"{path}: invalid radix table ({exc})") from exc
    if scheme.group_count != group_count:
        raise FormatError(
            f"{path}: header group count {group_count} does not match "
            f"{scheme.group_count} derived from {dim} dimensions"
        )
    dtype = "<u2" if width == 16 else "<u4"
    expected = offset + (width // 8) * frames * group_count
    if len(raw) != expected:
        raise FormatError(
            f"{path}: payload size {len(raw) - offset} does not match header "
            f"({frames} x {group_count} x u{width})"
        )
    tokens = np.frombuffer(raw, dtype=dtype, offset=offset).reshape(frames, group_count)
    # TokenStream revalidates every token against its group vocabulary and
    # raises ValidationError naming the offending frame and group.
    return TokenStream(
        tokens=tokens.astype(np.uint64), scheme=scheme, frame_rate_hz=frame_rate
    )


def write_mask_file(path, mask: np.ndarray) -> None:
    """Write a {0,1} mask as one byte per frame."""
    mask = np.asarray(mask)
    if not np.isin(mask, (0, 1)).all():
        raise ValidationError("mask must contain only 0 and 1")
    Path(path).write_bytes(mask.astype(np.uint8).tobytes())
