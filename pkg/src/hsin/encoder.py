"""Overfit one network per image and package the result.

Compression here IS training: the weights that best reproduce the cube are
the compressed representation. The trainer evaluates full-grid PSNR on a
cadence and keeps the best snapshot seen, so a run can never return worse
weights than it once had. Architecture search trains each candidate shape
briefly under a rate budget and keeps the winner.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .adam import TrainingDiverged, adam_step, fresh_state
from .codec import EncodedImage, dequantize, quantize, reconstruct_normalized
from .cube import HyperCube, normalize
from .metrics import QualityReport, bpppb, ssim_mean
from .nn import Batch, mlp_loss_and_grad
from .sampling import SampleConfig, build_grid, gather_batch, sample_indices
from .siren import DEFAULT_W0, SirenSpec, init_params, param_count

PRECISIONS = ("full32", "half16")

# n_h x w_h ladder the search sweeps by default
DEFAULT_CANDIDATES: list[tuple[int, int]] = [
    (n_h, w_h) for n_h in (5, 10, 15, 20, 25) for w_h in (20, 40, 60, 100)
]

DEFAULT_PROBE_ITERATIONS = 2000


@dataclass(frozen=True)
class TrainConfig:
    """One training run's knobs."""

    iterations: int
    lr: float = 2e-4
    eval_every: int = 100
    sample: SampleConfig | None = None
    seed: int = 0
    precision: str = "full32"

    def __post_init__(self) -> None:
        if not isinstance(self.iterations, int) or self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations!r}")
        if not isinstance(self.eval_every, int) or self.eval_every < 1:
            raise ValueError(f"eval_every must be >= 1, got {self.eval_every!r}")
        if not self.lr > 0:
            raise ValueError(f"lr must be positive, got {self.lr!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.precision not in PRECISIONS:
            raise ValueError(f"precision must be one of {PRECISIONS}, got {self.precision!r}")


@dataclass(eq=False)
class BestSnapshot:
    """Best parameters seen during a run, by full-grid PSNR."""

    params: np.ndarray
    psnr: float
    epoch: int
    history: list[tuple[int, float]] = field(default_factory=list)


def _grid_psnr(spec: SirenSpec, params: np.ndarray, width: int, height: int,
               targets64: np.ndarray) -> float:
    """Full-grid PSNR through the decode-side reconstruction path."""
    recon = reconstruct_normalized(spec, params, width, height)
    diff = recon.astype(np.float64) - targets64
    m = float(np.mean(diff * diff))
    if m == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / m)


def overfit(cube: HyperCube, spec: SirenSpec, cfg: TrainConfig) -> BestSnapshot:
    """Train one network on one normalized cube, keeping the best snapshot.

    Every eval_every epochs (and at the final epoch) full-grid PSNR is
    measured; for half16 the candidate weights are first pushed through a
    quantize/dequantize round trip so the score equals post-decode quality.
    The returned snapshot is the argmax over those evaluations, never simply
    the last epoch.
    """
    if cube.bands != spec.out_dim:
        raise ValueError(f"cube has {cube.bands} bands but spec.out_dim = {spec.out_dim}")
    if float(cube.data.min()) < 0.0 or float(cube.data.max()) > 1.0:
        raise ValueError("overfit expects a normalized cube with values in [0, 1]")

    grid = build_grid(cube.width, cube.height)
    targets64 = np.ascontiguousarray(cube.band_matrix().T)  # (n_pixels, bands)
    half = cfg.precision == "half16"

    full_batch = None
    if cfg.sample is None:
        full_batch = Batch(
            grid.coords.astype(np.float32),
            targets64.astype(np.float32),
        )

    params = init_params(spec, cfg.seed)
    state = fresh_state(params, lr=cfg.lr)

    best_params = None
    best_psnr = -math.inf
    best_epoch = 0
    history: list[tuple[int, float]] = []

    for epoch in range(1, cfg.iterations + 1):
        if full_batch is not None:
            batch = full_batch
        else:
            idx = sample_indices(cube.width, cube.height, cfg.sample, epoch=epoch)
            batch = gather_batch(cube, grid, idx, dtype=np.float32)
        loss, grads = mlp_loss_and_grad(spec, params, batch)
        if not math.isfinite(loss):
            raise TrainingDiverged(f"loss became {loss!r} at iteration {epoch}")
        params, state = adam_step(state, params, grads)

        if epoch % cfg.eval_every == 0 or epoch == cfg.iterations:
            eval_params = dequantize(quantize(params)) if half else params
            score = _grid_psnr(spec, eval_params, cube.width, cube.height, targets64)
            history.append((epoch, score))
            if score > best_psnr:
                best_psnr = score
                best_epoch = epoch
                best_params = params.copy()

    return BestSnapshot(params=best_params, psnr=best_psnr, epoch=best_epoch, history=history)


def architecture_search(cube: HyperCube, budget_bpppb: float,
                        candidates: list[tuple[int, int]] | None = None,
                        probe_cfg: TrainConfig | None = None) -> SirenSpec:
    """Pick the best (n_hidden, hidden_width) shape within a rate budget.

    Candidates over budget are dropped; the rest each get a short probe run
    on the (normalized) cube and the highest full-grid PSNR wins. Ties go to
    fewer parameters, then fewer layers. A lone feasible candidate is
    returned without training.
    """
    if candidates is None:
        candidates = DEFAULT_CANDIDATES
    if probe_cfg is None:
        probe_cfg = TrainConfig(iterations=DEFAULT_PROBE_ITERATIONS)
    bits = 16 if probe_cfg.precision == "half16" else 32

    feasible = []
    for n_h, w_h in candidates:
        spec = SirenSpec(n_hidden=n_h, hidden_width=w_h, out_dim=cube.bands)
        rate = bpppb(param_count(spec), bits, cube.width, cube.height, cube.bands)
        if rate <= budget_bpppb:
            feasible.append(spec)
    if not feasible:
        raise ValueError(f"no candidate architecture fits within {budget_bpppb} bpppb")
    if len(feasible) == 1:
        return feasible[0]

    best_spec = None
    best_key = None
    for spec in feasible:
        snap = overfit(cube, spec, probe_cfg)
        key = (snap.psnr, -param_count(spec), -spec.n_hidden)
        if best_key is None or key > best_key:
            best_key = key
            best_spec = spec
    return best_spec


def write_history_csv(history: list[tuple[int, float]], path: str | Path) -> None:
    """epoch,psnr rows for plotting training curves."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "psnr"])
        for epoch, score in history:
            writer.writerow([epoch, repr(float(score))])


def compress(cube: HyperCube, spec_or_budget: SirenSpec | float, cfg: TrainConfig,
             candidates: list[tuple[int, int]] | None = None,
             probe_iterations: int = DEFAULT_PROBE_ITERATIONS,
             history_csv: str | Path | None = None) -> tuple[EncodedImage, QualityReport]:
    """Full pipeline: normalize, (optionally) search, overfit, package.

    spec_or_budget is either an explicit SirenSpec or a bpppb budget that
    triggers architecture search. The report's distortion numbers are
    computed through the decode-side reconstruction of the exact payload
    parameters, so they equal what decompress will deliver.
    """
    if max(cube.width, cube.height, cube.bands) > 65535:
        raise ValueError("cube dimensions exceed the 16-bit header fields")
    t0 = time.perf_counter()
    normalized, scale = normalize(cube)

    if isinstance(spec_or_budget, SirenSpec):
        spec = spec_or_budget
        if spec.out_dim != cube.bands:
            raise ValueError(f"spec.out_dim {spec.out_dim} != cube bands {cube.bands}")
        if spec.in_dim != 2:
            raise ValueError("the file format only covers 2-D coordinate inputs")
        if spec.w0 != DEFAULT_W0:
            raise ValueError(f"the file format fixes w0 = {DEFAULT_W0}; got {spec.w0}")
    else:
        budget = float(spec_or_budget)
        probe_cfg = replace(cfg, iterations=probe_iterations)
        spec = architecture_search(normalized, budget, candidates, probe_cfg)

    snap = overfit(normalized, spec, cfg)
    half = cfg.precision == "half16"
    payload = quantize(snap.params) if half else snap.params.astype(np.float32, copy=False)
    enc = EncodedImage(
        width=cube.width, height=cube.height, bands=cube.bands,
        n_hidden=spec.n_hidden, hidden_width=spec.hidden_width,
        quantized=half, scale=scale, params=payload,
    )
    compress_seconds = time.perf_counter() - t0

    t1 = time.perf_counter()
    decode_params = dequantize(payload) if half else payload
    recon = reconstruct_normalized(spec, decode_params, cube.width, cube.height)
    decompress_seconds = time.perf_counter() - t1

    targets64 = np.ascontiguousarray(normalized.band_matrix().T)
    diff = recon.astype(np.float64) - targets64
    m = float(np.mean(diff * diff))
    score = math.inf if m == 0.0 else 10.0 * math.log10(1.0 / m)
    bits = 16 if half else 32
    report = QualityReport(
        mse=m,
        psnr=score,
        ssim_mean=ssim_mean(normalized, recon.T),
        bpppb=bpppb(param_count(spec), bits, cube.width, cube.height, cube.bands),
        compress_seconds=compress_seconds,
        decompress_seconds=decompress_seconds,
    )
    if history_csv is not None:
        write_history_csv(snap.history, history_csv)
    return enc, report
