"""Bitstream serialization and decoding.

File layout (little-endian, 25-byte fixed prefix, see FORMAT.md):

    offset  size  field
    0       4     magic "HSIN"
    4       1     format version (1)
    5       2     width   (uint16)
    7       2     height  (uint16)
    9       2     bands   (uint16)
    11      1     n_hidden      (uint8)
    12      1     hidden_width  (uint8)
    13      1     precision flag: 0 = float32 payload, 1 = float16
    14      3     reserved, written as zero, ignored on read
    17      4     raw_min (float32)
    21      4     raw_max (float32)
    25      ...   parameter payload, canonical flat order

The architecture plus the band count fully determine the parameter count, so
the payload length is implied and checked. The sine frequency is a constant
of format version 1 (w0 = 30); it is not stored.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .cube import HyperCube, ScaleInfo
from .nn import mlp_forward
from .sampling import build_grid
from .siren import DEFAULT_W0, SirenSpec, param_count

MAGIC = b"HSIN"
VERSION = 1

_HEADER = struct.Struct("<4sBHHHBBB3x")
_SCALE = struct.Struct("<ff")
HEADER_BYTES = _HEADER.size + _SCALE.size  # 25

HALF_MAX = 65504.0


class BitstreamError(Exception):
    """Raised for malformed, truncated, or inconsistent bitstreams."""


class HalfRangeError(ValueError):
    """Raised when a parameter cannot be represented in float16."""


def quantize(params: np.ndarray) -> np.ndarray:
    """Round-to-nearest-even conversion of a parameter vector to float16.

    Every value must be finite and within +-65504; numpy would silently
    overflow to inf otherwise, so the range is checked up front and the
    error names the offending parameter.
    """
    arr = np.asarray(params)
    bad = ~np.isfinite(arr)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise HalfRangeError(f"parameter {i} is {arr[i]!r}; only finite values can be quantized")
    over = np.abs(arr) > HALF_MAX
    if over.any():
        i = int(np.flatnonzero(over)[0])
        raise HalfRangeError(
            f"parameter {i} = {arr[i]!r} exceeds the half-precision range +-{HALF_MAX:.0f}"
        )
    return arr.astype(np.float16)


def dequantize(half: np.ndarray) -> np.ndarray:
    """Exact widening of float16 back to float32."""
    return np.asarray(half, dtype=np.float16).astype(np.float32)


@dataclass(eq=False)
class EncodedImage:
    """Everything needed to reconstruct one cube: shape, net, scale, weights."""

    width: int
    height: int
    bands: int
    n_hidden: int
    hidden_width: int
    quantized: bool
    scale: ScaleInfo
    params: np.ndarray

    def __post_init__(self) -> None:
        for name, hi in (("width", 65535), ("height", 65535), ("bands", 65535),
                         ("n_hidden", 255), ("hidden_width", 255)):
            v = getattr(self, name)
            if not isinstance(v, int) or not 1 <= v <= hi:
                raise ValueError(f"{name} must be an integer in [1, {hi}], got {v!r}")
        want = np.float16 if self.quantized else np.float32
        if self.params.ndim != 1 or self.params.dtype != want:
            raise ValueError(
                f"params must be a 1-D {np.dtype(want).name} vector, "
                f"got {self.params.dtype} with shape {self.params.shape}"
            )
        expected = param_count(self.to_spec())
        if self.params.size != expected:
            raise ValueError(f"expected {expected} parameters, got {self.params.size}")
        # the wire format stores the scale at float32 precision; canonicalize
        # now so a serialize round trip reproduces this object bitwise
        self.scale = ScaleInfo(
            float(np.float32(self.scale.raw_min)), float(np.float32(self.scale.raw_max))
        )

    def to_spec(self) -> SirenSpec:
        return SirenSpec(
            n_hidden=self.n_hidden,
            hidden_width=self.hidden_width,
            out_dim=self.bands,
            w0=DEFAULT_W0,
        )


def encoded_size(enc: EncodedImage) -> int:
    """Exact byte length serialize will produce."""
    return HEADER_BYTES + enc.params.size * (2 if enc.quantized else 4)


def serialize(enc: EncodedImage) -> bytes:
    head = _HEADER.pack(
        MAGIC, VERSION, enc.width, enc.height, enc.bands,
        enc.n_hidden, enc.hidden_width, int(enc.quantized),
    )
    scale = _SCALE.pack(enc.scale.raw_min, enc.scale.raw_max)
    payload = enc.params.astype("<f2" if enc.quantized else "<f4", copy=False).tobytes()
    return head + scale + payload


def deserialize(blob: bytes) -> EncodedImage:
    if len(blob) < HEADER_BYTES:
        raise BitstreamError(f"stream truncated: {len(blob)} bytes, header needs {HEADER_BYTES}")
    magic, version, width, height, bands, n_hidden, hidden_width, qflag = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise BitstreamError(f"bad magic {magic!r}")
    if version != VERSION:
        raise BitstreamError(f"unsupported format version {version}")
    if qflag not in (0, 1):
        raise BitstreamError(f"bad precision flag {qflag}")
    if min(width, height, bands, n_hidden, hidden_width) < 1:
        raise BitstreamError("header contains a zero dimension")
    raw_min, raw_max = _SCALE.unpack_from(blob, _HEADER.size)
    count = param_count(SirenSpec(n_hidden=n_hidden, hidden_width=hidden_width, out_dim=bands))
    itemsize = 2 if qflag else 4
    expected = HEADER_BYTES + count * itemsize
    if len(blob) != expected:
        raise BitstreamError(f"expected {expected} bytes for {count} parameters, got {len(blob)}")
    params = np.frombuffer(blob, dtype="<f2" if qflag else "<f4", offset=HEADER_BYTES).copy()
    try:
        return EncodedImage(
            width=width, height=height, bands=bands,
            n_hidden=n_hidden, hidden_width=hidden_width,
            quantized=bool(qflag), scale=ScaleInfo(raw_min, raw_max), params=params,
        )
    except ValueError as exc:
        raise BitstreamError(f"inconsistent stream: {exc}") from exc


def reconstruct_normalized(spec: SirenSpec, params: np.ndarray, width: int, height: int) -> np.ndarray:
    """Evaluate the net on the full grid; (n_pixels, bands) float32 in [0, 1].

    This is the decode path; the encoder scores snapshots through the same
    call so reported quality matches what a decoder will actually see.
    """
    coords = build_grid(width, height).coords.astype(np.float32)
    out = mlp_forward(spec, np.asarray(params, dtype=np.float32), coords)
    np.clip(out, 0.0, 1.0, out=out)
    return out


def decompress(enc: EncodedImage) -> HyperCube:
    """Decode to a cube in raw units."""
    params = dequantize(enc.params) if enc.quantized else enc.params
    recon = reconstruct_normalized(enc.to_spec(), params, enc.width, enc.height)
    span = enc.scale.raw_max - enc.scale.raw_min
    raw = recon.T.astype(np.float64) * span + enc.scale.raw_min
    data = np.ascontiguousarray(raw).ravel()
    rng = (float(data.min()), float(data.max()))
    return HyperCube(enc.width, enc.height, enc.bands, data, rng)
