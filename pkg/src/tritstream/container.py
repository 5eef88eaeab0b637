"""Scalable bitstream container and the shared binary tensor file format.

Stream files (extension ``.dpts``) are laid out as::

    offset  size  field
    0       4     magic "DPTS"
    4       1     version (currently 1)
    5       2     C   (u16 LE)
    7       2     H   (u16 LE)
    9       2     W   (u16 LE)
    11      1     num_planes / refinement levels (u8)
    12      4     pixel_count (u32 LE, for bpp accounting)
    16      8     sigma_digest (blake2b-64 of the model tensors)
    24      4     sideinfo_len (u32 LE)
    28      1     coder_id (1 = 48-bit FIFO range coder)
    29      1     strategy_id (see codec.StrategyId)
    30      2     reserved, zero
    32      --    side info bytes (opaque hyper-latent slot), then payload

Everything after the header is truncatable at any byte: the side info and
header must survive intact, the entropy payload degrades gracefully.  No
payload length is recorded on purpose; the payload is "whatever follows",
which is what makes a byte-truncated file a valid stream.

Tensor files (extension ``.dptf``) hold one or more records, each::

    magic "DPTF" | dtype u8 (0 = float32) | rank u8 | dims u16 LE each |
    row-major little-endian payload

A model file is two records (mu then sigma); a latent file is one.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    BelowMinimumLength,
    CorruptHeader,
    DimensionOverflow,
    FormatError,
)

__all__ = [
    "HEADER_SIZE",
    "STREAM_MAGIC",
    "TENSOR_MAGIC",
    "CODER_RANGE48",
    "StreamHeader",
    "model_digest",
    "write_stream",
    "read_stream",
    "truncate_stream",
    "save_tensors",
    "load_tensors",
]

STREAM_MAGIC = b"DPTS"
TENSOR_MAGIC = b"DPTF"
STREAM_VERSION = 1
CODER_RANGE48 = 1
HEADER_SIZE = 32

_HEADER_FMT = "<4sBHHHBI8sIBB2s"
assert struct.calcsize(_HEADER_FMT) == HEADER_SIZE


@dataclass(frozen=True)
class StreamHeader:
    shape: tuple[int, int, int]
    num_planes: int
    pixel_count: int
    sigma_digest: bytes
    sideinfo_len: int
    coder_id: int = CODER_RANGE48
    strategy_id: int = 1
    version: int = STREAM_VERSION

    def __post_init__(self) -> None:
        c, h, w = self.shape
        for name, value, limit in (
            ("C", c, 0xFFFF),
            ("H", h, 0xFFFF),
            ("W", w, 0xFFFF),
            ("num_planes", self.num_planes, 0xFF),
            ("pixel_count", self.pixel_count, 0xFFFFFFFF),
            ("sideinfo_len", self.sideinfo_len, 0xFFFFFFFF),
            ("coder_id", self.coder_id, 0xFF),
            ("strategy_id", self.strategy_id, 0xFF),
        ):
            if not 0 <= value <= limit:
                raise DimensionOverflow(f"{name}={value} does not fit its header slot")
        if len(self.sigma_digest) != 8:
            raise DimensionOverflow("sigma_digest must be exactly 8 bytes")

    def pack(self) -> bytes:
        c, h, w = self.shape
        return struct.pack(
            _HEADER_FMT,
            STREAM_MAGIC,
            self.version,
            c,
            h,
            w,
            self.num_planes,
            self.pixel_count,
            self.sigma_digest,
            self.sideinfo_len,
            self.coder_id,
            self.strategy_id,
            b"\x00\x00",
        )

    @classmethod
    def unpack(cls, data: bytes) -> "StreamHeader":
        if len(data) < HEADER_SIZE:
            raise BelowMinimumLength(f"need {HEADER_SIZE} header bytes, have {len(data)}")
        magic, version, c, h, w, planes, pixels, digest, silen, coder, strat, _pad = struct.unpack(
            _HEADER_FMT, data[:HEADER_SIZE]
        )
        if magic != STREAM_MAGIC:
            raise CorruptHeader(f"bad magic {magic!r}")
        if version != STREAM_VERSION:
            raise CorruptHeader(f"unsupported stream version {version}")
        return cls(
            shape=(c, h, w),
            num_planes=planes,
            pixel_count=pixels,
            sigma_digest=digest,
            sideinfo_len=silen,
            coder_id=coder,
            strategy_id=strat,
            version=version,
        )

    @property
    def min_length(self) -> int:
        return HEADER_SIZE + self.sideinfo_len


def model_digest(mu: np.ndarray, sigma: np.ndarray) -> bytes:
    """64-bit digest binding a stream to its (mu, sigma) model tensors."""
    h = hashlib.blake2b(digest_size=8)
    for arr in (mu, sigma):
        a = np.ascontiguousarray(arr, dtype="<f4")
        h.update(np.array(a.shape, dtype="<u4").tobytes())
        h.update(a.tobytes())
    return h.digest()


def write_stream(header: StreamHeader, sideinfo: bytes, payload: bytes) -> bytes:
    if header.sideinfo_len != len(sideinfo):
        raise DimensionOverflow(
            f"header sideinfo_len={header.sideinfo_len} != len(sideinfo)={len(sideinfo)}"
        )
    return header.pack() + bytes(sideinfo) + bytes(payload)


def read_stream(data: bytes) -> tuple[StreamHeader, bytes, bytes]:
    """Split a (possibly truncated) stream into header, sideinfo, payload.

    The header and side info must be complete; the payload is whatever
    bytes remain.
    """
    header = StreamHeader.unpack(data)
    if len(data) < header.min_length:
        raise BelowMinimumLength(
            f"stream holds {len(data)} bytes but header+sideinfo need {header.min_length}"
        )
    sideinfo = bytes(data[HEADER_SIZE : header.min_length])
    payload = bytes(data[header.min_length :])
    return header, sideinfo, payload


def truncate_stream(data: bytes, target_bytes: int) -> bytes:
    """Byte prefix of a stream; must keep at least header plus side info."""
    header = StreamHeader.unpack(data)
    if target_bytes < header.min_length:
        raise BelowMinimumLength(
            f"cannot truncate below {header.min_length} bytes (header + sideinfo)"
        )
    return bytes(data[: min(target_bytes, len(data))])


_DTYPE_TAGS = {0: np.dtype("<f4")}


def save_tensors(path: str, arrays: list[np.ndarray]) -> None:
    """Write arrays as consecutive DPTF records (float32, little-endian)."""
    with open(path, "wb") as fh:
        for arr in arrays:
            a = np.ascontiguousarray(arr, dtype="<f4")
            if a.ndim < 1 or a.ndim > 255:
                raise DimensionOverflow(f"rank {a.ndim} not supported")
            if any(d > 0xFFFF for d in a.shape):
                raise DimensionOverflow(f"dimension too large for u16 in shape {a.shape}")
            fh.write(TENSOR_MAGIC)
            fh.write(struct.pack("<BB", 0, a.ndim))
            fh.write(struct.pack(f"<{a.ndim}H", *a.shape))
            fh.write(a.tobytes())


def load_tensors(path: str) -> list[np.ndarray]:
    """Read all DPTF records from a file."""
    with open(path, "rb") as fh:
        data = fh.read()
    arrays: list[np.ndarray] = []
    pos = 0
    while pos < len(data):
        if data[pos : pos + 4] != TENSOR_MAGIC:
            raise FormatError(f"bad tensor magic at offset {pos}")
        pos += 4
        if pos + 2 > len(data):
            raise FormatError("truncated tensor record header")
        tag, rank = struct.unpack_from("<BB", data, pos)
        pos += 2
        if tag not in _DTYPE_TAGS:
            raise FormatError(f"unknown dtype tag {tag}")
        if pos + 2 * rank > len(data):
            raise FormatError("truncated tensor dims")
        dims = struct.unpack_from(f"<{rank}H", data, pos)
        pos += 2 * rank
        dtype = _DTYPE_TAGS[tag]
        nbytes = int(np.prod(dims)) * dtype.itemsize
        if pos + nbytes > len(data):
            raise FormatError("truncated tensor payload")
        arr = np.frombuffer(data[pos : pos + nbytes], dtype=dtype).reshape(dims)
        arrays.append(arr.copy())
        pos += nbytes
    return arrays
