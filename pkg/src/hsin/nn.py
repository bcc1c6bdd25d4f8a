"""Forward evaluation and exact analytic gradients for the sine MLP.

The backward pass is hand-derived: for y = x @ W.T + b,
dL/dW = dy.T @ x, dL/db = dy.sum(0), dL/dx = dy @ W, and the sine
activation contributes an elementwise w0 * cos(w0 * z) factor. Gradients
come back as one flat vector in the same canonical order as the parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .siren import SirenSpec, layer_shapes, unflatten


@dataclass(eq=False)
class Batch:
    """Paired coordinates (n, in_dim) and target spectra (n, out_dim)."""

    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self) -> None:
        if self.inputs.ndim != 2 or self.targets.ndim != 2:
            raise ValueError("inputs and targets must be 2-D")
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ValueError(
                f"row mismatch: {self.inputs.shape[0]} inputs vs {self.targets.shape[0]} targets"
            )
        if self.inputs.shape[0] < 1:
            raise ValueError("batch must contain at least one sample")

    @property
    def size(self) -> int:
        return self.inputs.shape[0]


def affine_forward(weights: np.ndarray, biases: np.ndarray, x: np.ndarray) -> np.ndarray:
    """x @ W.T + b for a batch of rows."""
    if x.shape[1] != weights.shape[1]:
        raise ValueError(f"input dim {x.shape[1]} != layer fan_in {weights.shape[1]}")
    return x @ weights.T + biases


def sine_forward(z: np.ndarray, w0: float) -> np.ndarray:
    return np.sin(w0 * z)


def mlp_forward(spec: SirenSpec, params: np.ndarray, inputs: np.ndarray) -> np.ndarray:
    """Evaluate the network on (n, in_dim) coordinates; returns (n, out_dim)."""
    layers = unflatten(spec, params)
    a = np.asarray(inputs, dtype=params.dtype)
    if a.ndim != 2 or a.shape[1] != spec.in_dim:
        raise ValueError(f"inputs must be (n, {spec.in_dim}), got {a.shape}")
    for layer in layers[:-1]:
        a = sine_forward(affine_forward(layer.weights, layer.biases, a), spec.w0)
    last = layers[-1]
    return affine_forward(last.weights, last.biases, a)


def mlp_loss(spec: SirenSpec, params: np.ndarray, batch: Batch) -> float:
    """Mean squared error over every entry of the batch output."""
    pred = mlp_forward(spec, params, batch.inputs)
    targets = np.asarray(batch.targets, dtype=params.dtype)
    diff = pred - targets
    return float(np.mean(diff * diff))


def mlp_loss_and_grad(spec: SirenSpec, params: np.ndarray, batch: Batch) -> tuple[float, np.ndarray]:
    """MSE loss and its exact gradient with respect to every parameter.

    Arithmetic stays in the dtype of `params` (float32 in training,
    float64 in gradient checks); w0 is applied as a python float so no
    accidental upcast happens.
    """
    layers = unflatten(spec, params)
    w0 = float(spec.w0)
    x = np.asarray(batch.inputs, dtype=params.dtype)
    targets = np.asarray(batch.targets, dtype=params.dtype)

    # forward, caching each layer's input and pre-activation
    acts = [x]
    pres = []
    a = x
    for layer in layers[:-1]:
        z = affine_forward(layer.weights, layer.biases, a)
        pres.append(z)
        a = np.sin(w0 * z)
        acts.append(a)
    last = layers[-1]
    pred = affine_forward(last.weights, last.biases, a)

    diff = pred - targets
    loss = float(np.mean(diff * diff))

    # d(mean of diff^2)/d(pred); total entry count normalizes the mean
    dy = diff * (2.0 / diff.size)

    grads = [np.empty(0)] * len(layers)
    for i in range(len(layers) - 1, -1, -1):
        layer = layers[i]
        gw = dy.T @ acts[i]
        gb = dy.sum(axis=0)
        grads[i] = np.concatenate([gw.ravel(), gb])
        if i > 0:
            dx = dy @ layer.weights
            dy = dx * (w0 * np.cos(w0 * pres[i - 1]))
    return loss, np.concatenate(grads).astype(params.dtype, copy=False)


def numeric_gradient(spec: SirenSpec, params: np.ndarray, batch: Batch, eps: float = 1e-4) -> np.ndarray:
    """Central-difference gradient, one coordinate at a time.

    Always evaluated in float64; quadratic truncation error is O(eps^2)
    with roundoff O(machine_eps / eps), so eps near 1e-4 balances both.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    p = np.asarray(params, dtype=np.float64).copy()
    batch64 = Batch(
        np.asarray(batch.inputs, dtype=np.float64),
        np.asarray(batch.targets, dtype=np.float64),
    )
    grad = np.empty_like(p)
    for i in range(p.size):
        saved = p[i]
        p[i] = saved + eps
        hi = mlp_loss(spec, p, batch64)
        p[i] = saved - eps
        lo = mlp_loss(spec, p, batch64)
        p[i] = saved
        grad[i] = (hi - lo) / (2.0 * eps)
    return grad
