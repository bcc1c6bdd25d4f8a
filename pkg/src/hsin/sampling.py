"""Coordinate grids on [-1, 1]^2 and windowed random pixel subsets.

Training on every pixel each iteration is wasteful for smooth images, so the
sampler tiles the image into window x window blocks (edge blocks may be
smaller) and draws a fixed-size uniform subset of pixels from every block.
Each block always contributes at least one pixel, which keeps coverage
spatially even at low rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cube import HyperCube
from .nn import Batch


@dataclass(eq=False)
class CoordGrid:
    """All pixel-center coordinates of a width x height image, row-major."""

    width: int
    height: int
    coords: np.ndarray  # (width*height, 2) float64 in [-1, 1]


@dataclass(frozen=True)
class SampleConfig:
    """Windowed sampling knobs; rate is the per-block fraction kept."""

    window: int
    rate: float
    seed: int = 0
    resample_each_epoch: bool = True

    def __post_init__(self) -> None:
        if not isinstance(self.window, int) or self.window < 1:
            raise ValueError(f"window must be a positive integer, got {self.window!r}")
        if not 0.0 < self.rate <= 1.0:
            raise ValueError(f"rate must lie in (0, 1], got {self.rate!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")


def _axis_coords(n: int) -> np.ndarray:
    # -1 + 2*j/(n-1); a single sample sits at 0
    if n == 1:
        return np.zeros(1)
    return np.arange(n, dtype=np.float64) * (2.0 / (n - 1)) - 1.0


def build_grid(width: int, height: int) -> CoordGrid:
    """Row-major (x, y) pairs covering the image, endpoints at exactly +-1."""
    if width < 1 or height < 1:
        raise ValueError("grid dimensions must be >= 1")
    xs = _axis_coords(width)
    ys = _axis_coords(height)
    coords = np.empty((height * width, 2), dtype=np.float64)
    coords[:, 0] = np.tile(xs, height)
    coords[:, 1] = np.repeat(ys, width)
    return CoordGrid(width, height, coords)


def _block_k(rate: float, npix: int) -> int:
    # round-half-up share of the block, never below one pixel
    return min(npix, max(1, int(math.floor(rate * npix + 0.5))))


def sample_indices(width: int, height: int, cfg: SampleConfig, epoch: int = 0) -> np.ndarray:
    """Sorted flat pixel indices drawn for one epoch.

    Deterministic in (cfg.seed, epoch); with resample_each_epoch False every
    epoch reuses the epoch-0 draw. Blocks of equal shape are drawn in one
    vectorized pass: uniform keys per pixel, k smallest kept, which makes
    every k-subset of a block equally likely.
    """
    if width < 1 or height < 1:
        raise ValueError("image dimensions must be >= 1")
    if epoch < 0:
        raise ValueError("epoch must be >= 0")
    eff_epoch = epoch if cfg.resample_each_epoch else 0
    rng = np.random.default_rng([cfg.seed, eff_epoch])

    x_starts = np.arange(0, width, cfg.window)
    y_starts = np.arange(0, height, cfg.window)
    x_sizes = np.minimum(cfg.window, width - x_starts)
    y_sizes = np.minimum(cfg.window, height - y_starts)

    # group blocks by shape (row-major encounter order, kept stable so the
    # stream of random draws is reproducible)
    groups: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for y0, bh in zip(y_starts, y_sizes):
        for x0, bw in zip(x_starts, x_sizes):
            groups.setdefault((int(bw), int(bh)), []).append((int(x0), int(y0)))

    chunks = []
    for (bw, bh), origins in groups.items():
        npix = bw * bh
        k = _block_k(cfg.rate, npix)
        ox = np.array([o[0] for o in origins])
        oy = np.array([o[1] for o in origins])
        keys = rng.random((len(origins), npix))
        if k == npix:
            sel = np.arange(npix)[None, :].repeat(len(origins), axis=0)
        else:
            sel = np.argpartition(keys, k - 1, axis=1)[:, :k]
        dy, dx = sel // bw, sel % bw
        flat = (oy[:, None] + dy) * width + (ox[:, None] + dx)
        chunks.append(flat.ravel())
    return np.sort(np.concatenate(chunks)).astype(np.int64)


def expected_sample_count(width: int, height: int, cfg: SampleConfig) -> int:
    """Exact number of indices sample_indices returns for this geometry."""
    x_sizes = np.minimum(cfg.window, width - np.arange(0, width, cfg.window))
    y_sizes = np.minimum(cfg.window, height - np.arange(0, height, cfg.window))
    total = 0
    for bh in y_sizes:
        for bw in x_sizes:
            total += _block_k(cfg.rate, int(bw) * int(bh))
    return total


def gather_batch(cube: HyperCube, grid: CoordGrid, indices: np.ndarray, dtype=None) -> Batch:
    """Pair selected pixel coordinates with their target spectra.

    dtype defaults to the cube's own (float64); training passes float32.
    """
    if (grid.width, grid.height) != (cube.width, cube.height):
        raise ValueError(
            f"grid {grid.width}x{grid.height} does not match cube {cube.width}x{cube.height}"
        )
    idx = np.asarray(indices, dtype=np.int64)
    if idx.ndim != 1 or idx.size < 1:
        raise ValueError("indices must be a non-empty 1-D array")
    if idx.min() < 0 or idx.max() >= cube.n_pixels:
        raise IndexError(f"pixel index out of range [0, {cube.n_pixels})")
    if dtype is None:
        dtype = cube.data.dtype
    inputs = grid.coords[idx].astype(dtype, copy=False)
    targets = cube.band_matrix()[:, idx].T.astype(dtype)
    return Batch(inputs, np.ascontiguousarray(targets))
