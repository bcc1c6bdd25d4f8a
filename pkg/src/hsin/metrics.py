"""Rate and distortion metrics: MSE, PSNR, band-averaged global SSIM, bpppb.

Every metric accepts either HyperCube objects or bare arrays and accumulates
in float64. SSIM here uses one set of global statistics per band (means,
variances, covariance over the whole band) rather than a sliding window;
the per-band scores are averaged over the spectral axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cube import HyperCube


def _flat(a) -> np.ndarray:
    if isinstance(a, HyperCube):
        return a.data
    return np.asarray(a, dtype=np.float64).ravel()


def _check_compatible(a, b) -> None:
    if isinstance(a, HyperCube) and isinstance(b, HyperCube):
        da = (a.width, a.height, a.bands)
        db = (b.width, b.height, b.bands)
        if da != db:
            raise ValueError(f"cube dimensions differ: {da} vs {db}")
    elif _flat(a).shape != _flat(b).shape:
        raise ValueError(f"sizes differ: {_flat(a).size} vs {_flat(b).size}")


def mse(a, b) -> float:
    """Mean squared error over every sample of the cube."""
    _check_compatible(a, b)
    x = _flat(a).astype(np.float64, copy=False)
    y = _flat(b).astype(np.float64, copy=False)
    d = x - y
    return float(np.mean(d * d))


def psnr(a, b, peak: float = 1.0) -> float:
    """10*log10(peak^2 / mse); +inf when the inputs are identical."""
    if not peak > 0:
        raise ValueError(f"peak must be positive, got {peak!r}")
    m = mse(a, b)
    if m == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / m)


def ssim_band(x, y, dynamic_range: float = 1.0) -> float:
    """Structural similarity of two single-band images, global statistics.

    C1 = (0.01*L)^2 and C2 = (0.03*L)^2 stabilize the ratio; both variance
    and covariance are computed from shared deviation arrays so that
    ssim_band(x, x) is exactly 1.
    """
    if not dynamic_range > 0:
        raise ValueError(f"dynamic_range must be positive, got {dynamic_range!r}")
    xv = _flat(x)
    yv = _flat(y)
    if xv.shape != yv.shape:
        raise ValueError(f"band sizes differ: {xv.size} vs {yv.size}")
    c1 = (0.01 * dynamic_range) ** 2
    c2 = (0.03 * dynamic_range) ** 2
    mx = float(xv.mean())
    my = float(yv.mean())
    dx = xv - mx
    dy = yv - my
    var_x = float(np.mean(dx * dx))
    var_y = float(np.mean(dy * dy))
    cov = float(np.mean(dx * dy))
    num = (2.0 * mx * my + c1) * (2.0 * cov + c2)
    den = (mx * mx + my * my + c1) * (var_x + var_y + c2)
    return num / den


def _band_rows(a) -> np.ndarray:
    """(bands, n_pixels) float64 rows for a cube or an array shaped that way."""
    if isinstance(a, HyperCube):
        return a.band_matrix()
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 3:
        return arr.reshape(arr.shape[0], -1)
    if arr.ndim != 2:
        raise ValueError("expected a HyperCube or a (bands, n_pixels) array")
    return arr


def ssim_mean(a, b, dynamic_range: float = 1.0) -> float:
    """ssim_band averaged across all spectral bands."""
    xa = _band_rows(a)
    xb = _band_rows(b)
    if xa.shape != xb.shape:
        raise ValueError(f"band layouts differ: {xa.shape} vs {xb.shape}")
    scores = [ssim_band(xa[k], xb[k], dynamic_range) for k in range(xa.shape[0])]
    return float(np.mean(scores))


def bpppb(n_params: int, bits_per_param: int, width: int, height: int, bands: int) -> float:
    """Bits per pixel per band of a weight payload spread over the cube."""
    if n_params < 1 or bits_per_param < 1:
        raise ValueError("parameter count and bit width must be >= 1")
    if min(width, height, bands) < 1:
        raise ValueError("cube dimensions must be >= 1")
    return (n_params * bits_per_param) / (width * height * bands)


@dataclass
class QualityReport:
    """Everything one compression run reports, as plain floats."""

    mse: float
    psnr: float
    ssim_mean: float
    bpppb: float | None = None
    compress_seconds: float | None = None
    decompress_seconds: float | None = None

    def to_text(self) -> str:
        """key=value lines, floats at full round-trip precision."""
        lines = []
        for key in ("mse", "psnr", "ssim_mean", "bpppb", "compress_seconds", "decompress_seconds"):
            value = getattr(self, key)
            if value is None:
                continue
            lines.append(f"{key}={value!r}")
        return "\n".join(lines)
