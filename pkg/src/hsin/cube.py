"""Hyperspectral cube I/O and scaling.

Cubes live on disk as raw band-sequential (BSQ) little-endian float32 with a
plain-text sidecar header. In memory the samples are held as float64 so that
normalize/denormalize and the quality metrics are exact to well below any
tolerance we care about; values coming from disk are float32-representable,
so save followed by load is bitwise lossless for them.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

_INTERLEAVE = "bsq"
_DTYPE = "f32le"
_SYNTH_KINDS = ("smooth-gradient", "band-sinusoid", "random")


class CubeFormatError(Exception):
    """Raised for unreadable, truncated, or inconsistent cube files."""


@dataclass(frozen=True)
class CubeHeader:
    """Sidecar description of a raw cube file."""

    width: int
    height: int
    bands: int
    interleave: str = _INTERLEAVE
    dtype: str = _DTYPE

    def __post_init__(self) -> None:
        for name in ("width", "height", "bands"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise CubeFormatError(f"{name} must be a positive integer, got {v!r}")
        if self.interleave != _INTERLEAVE:
            raise CubeFormatError(f"unsupported interleave {self.interleave!r}")
        if self.dtype != _DTYPE:
            raise CubeFormatError(f"unsupported dtype {self.dtype!r}")


@dataclass(frozen=True)
class ScaleInfo:
    """Affine range captured before normalization, needed to undo it."""

    raw_min: float
    raw_max: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.raw_min) and np.isfinite(self.raw_max)):
            raise ValueError("scale bounds must be finite")
        if self.raw_max < self.raw_min:
            raise ValueError(f"raw_max {self.raw_max} < raw_min {self.raw_min}")


@dataclass(eq=False)
class HyperCube:
    """A width x height x bands cube stored as a flat BSQ float64 array."""

    width: int
    height: int
    bands: int
    data: np.ndarray
    value_range: tuple[float, float]

    def __post_init__(self) -> None:
        if min(self.width, self.height, self.bands) < 1:
            raise ValueError("cube dimensions must be >= 1")
        self.data = np.ascontiguousarray(self.data, dtype=np.float64).ravel()
        expected = self.width * self.height * self.bands
        if self.data.size != expected:
            raise ValueError(f"expected {expected} samples, got {self.data.size}")

    @property
    def n_pixels(self) -> int:
        return self.width * self.height

    def band_matrix(self) -> np.ndarray:
        """View of the data as (bands, n_pixels), one row per band."""
        return self.data.reshape(self.bands, self.n_pixels)

    def band(self, index: int) -> np.ndarray:
        """View of one band as a (height, width) image."""
        if not 0 <= index < self.bands:
            raise IndexError(f"band {index} out of range for {self.bands} bands")
        return self.band_matrix()[index].reshape(self.height, self.width)


def _from_values(width: int, height: int, bands: int, data: np.ndarray) -> HyperCube:
    data = np.ascontiguousarray(data, dtype=np.float64).ravel()
    rng = (float(data.min()), float(data.max()))
    return HyperCube(width, height, bands, data, rng)


def read_header(path: str | Path) -> CubeHeader:
    """Parse a key=value sidecar header."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CubeFormatError(f"cannot read header {path}: {exc}") from exc
    fields: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CubeFormatError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    try:
        return CubeHeader(
            width=int(fields["width"]),
            height=int(fields["height"]),
            bands=int(fields["bands"]),
            interleave=fields.get("interleave", _INTERLEAVE),
            dtype=fields.get("dtype", _DTYPE),
        )
    except KeyError as exc:
        raise CubeFormatError(f"{path}: missing header field {exc.args[0]}") from exc
    except ValueError as exc:
        raise CubeFormatError(f"{path}: bad header value: {exc}") from exc


def write_header(header: CubeHeader, path: str | Path) -> None:
    lines = [
        f"width={header.width}",
        f"height={header.height}",
        f"bands={header.bands}",
        f"interleave={header.interleave}",
        f"dtype={header.dtype}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def load_cube(data_path: str | Path, header: CubeHeader) -> HyperCube:
    """Read a raw BSQ float32 file described by `header`."""
    data_path = Path(data_path)
    try:
        raw = data_path.read_bytes()
    except OSError as exc:
        raise CubeFormatError(f"cannot read {data_path}: {exc}") from exc
    expected = header.width * header.height * header.bands * 4
    if len(raw) != expected:
        raise CubeFormatError(
            f"{data_path}: expected {expected} bytes for "
            f"{header.width}x{header.height}x{header.bands} float32, got {len(raw)}"
        )
    data = np.frombuffer(raw, dtype="<f4")
    return _from_values(header.width, header.height, header.bands, data)


def open_cube(data_path: str | Path, header_path: str | Path | None = None) -> HyperCube:
    """Load a cube given its data file, finding the sidecar next to it."""
    data_path = Path(data_path)
    if header_path is None:
        header_path = data_path.with_suffix(".hdr")
    return load_cube(data_path, read_header(header_path))


def save_cube(cube: HyperCube, data_path: str | Path, header_path: str | Path | None = None) -> None:
    """Write raw little-endian float32 BSQ plus the sidecar header."""
    data_path = Path(data_path)
    if header_path is None:
        header_path = data_path.with_suffix(".hdr")
    data_path.write_bytes(cube.data.astype("<f4").tobytes())
    write_header(CubeHeader(cube.width, cube.height, cube.bands), header_path)


def normalize(cube: HyperCube) -> tuple[HyperCube, ScaleInfo]:
    """Min-max scale all samples into [0, 1].

    A constant cube maps to all zeros. The returned ScaleInfo restores raw
    units via denormalize.
    """
    lo = float(cube.data.min())
    hi = float(cube.data.max())
    if hi > lo:
        scaled = (cube.data - lo) / (hi - lo)
    else:
        scaled = np.zeros_like(cube.data)
    return _from_values(cube.width, cube.height, cube.bands, scaled), ScaleInfo(lo, hi)


def denormalize(cube: HyperCube, scale: ScaleInfo) -> HyperCube:
    """Invert normalize: v * (raw_max - raw_min) + raw_min."""
    span = scale.raw_max - scale.raw_min
    data = cube.data * span + scale.raw_min
    return _from_values(cube.width, cube.height, cube.bands, data)


def _axis_unit(n: int) -> np.ndarray:
    # evenly spaced in [0, 1]; a single sample sits at 0
    if n == 1:
        return np.zeros(1)
    return np.arange(n, dtype=np.float64) / (n - 1)


def synth_cube(kind: str, width: int, height: int, bands: int, seed: int = 0) -> HyperCube:
    """Deterministic synthetic cubes for tests and demos.

    smooth-gradient: (x + y + band_frac) / 3, low frequency everywhere.
    band-sinusoid:   0.5 + 0.5*sin(2*pi*(x + y + band_frac)).
    random:          uniform noise in [0, 1).

    x and y are the unit-normalized pixel coordinates and band_frac is
    band_index / bands. Values are rounded through float32 so the cube
    survives a save/load round trip bitwise.
    """
    if kind not in _SYNTH_KINDS:
        raise ValueError(f"unknown synth kind {kind!r}; expected one of {_SYNTH_KINDS}")
    if min(width, height, bands) < 1:
        raise ValueError("cube dimensions must be >= 1")
    if kind == "random":
        vals = np.random.default_rng(seed).random(bands * height * width)
    else:
        x = _axis_unit(width)[None, None, :]
        y = _axis_unit(height)[None, :, None]
        t = (np.arange(bands, dtype=np.float64) / bands)[:, None, None]
        phase = x + y + t
        if kind == "smooth-gradient":
            vals = np.clip(phase / 3.0, 0.0, 1.0)
        else:
            vals = 0.5 + 0.5 * np.sin(2.0 * np.pi * phase)
    vals = vals.astype(np.float32).astype(np.float64)
    return _from_values(width, height, bands, vals)
