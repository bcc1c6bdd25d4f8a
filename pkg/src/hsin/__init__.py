"""hsin: hyperspectral image compression with coordinate networks.

A small MLP with sine activations is overfit to one cube, mapping pixel
coordinates to spectral signatures; its weights, optionally stored at half
precision, are the compressed file. Decompression evaluates the network on
the full coordinate grid and restores raw units.
"""

import os as _os

# BLAS backends read their thread-count variables at import time, so this
# must happen before numpy loads anywhere in the package.
_threads = _os.environ.get("HSIN_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)
del _os, _threads

from .adam import AdamState, TrainingDiverged, adam_step, fresh_state
from .codec import (
    BitstreamError,
    EncodedImage,
    HalfRangeError,
    decompress,
    dequantize,
    deserialize,
    encoded_size,
    quantize,
    reconstruct_normalized,
    serialize,
)
from .cube import (
    CubeFormatError,
    CubeHeader,
    HyperCube,
    ScaleInfo,
    denormalize,
    load_cube,
    normalize,
    open_cube,
    read_header,
    save_cube,
    synth_cube,
    write_header,
)
from .encoder import (
    DEFAULT_CANDIDATES,
    BestSnapshot,
    TrainConfig,
    architecture_search,
    compress,
    overfit,
    write_history_csv,
)
from .metrics import QualityReport, bpppb, mse, psnr, ssim_band, ssim_mean
from .nn import Batch, mlp_forward, mlp_loss, mlp_loss_and_grad, numeric_gradient
from .sampling import CoordGrid, SampleConfig, build_grid, gather_batch, sample_indices
from .siren import (
    DEFAULT_W0,
    LayerParams,
    SirenSpec,
    flatten,
    init_params,
    layer_shapes,
    param_count,
    unflatten,
)

__version__ = "0.1.0"

__all__ = [
    "AdamState", "TrainingDiverged", "adam_step", "fresh_state",
    "BitstreamError", "EncodedImage", "HalfRangeError", "decompress",
    "dequantize", "deserialize", "encoded_size", "quantize",
    "reconstruct_normalized", "serialize",
    "CubeFormatError", "CubeHeader", "HyperCube", "ScaleInfo", "denormalize",
    "load_cube", "normalize", "open_cube", "read_header", "save_cube",
    "synth_cube", "write_header",
    "DEFAULT_CANDIDATES", "BestSnapshot", "TrainConfig",
    "architecture_search", "compress", "overfit", "write_history_csv",
    "QualityReport", "bpppb", "mse", "psnr", "ssim_band", "ssim_mean",
    "Batch", "mlp_forward", "mlp_loss", "mlp_loss_and_grad", "numeric_gradient",
    "CoordGrid", "SampleConfig", "build_grid", "gather_batch", "sample_indices",
    "DEFAULT_W0", "LayerParams", "SirenSpec", "flatten", "init_params",
    "layer_shapes", "param_count", "unflatten",
    "__version__",
]
