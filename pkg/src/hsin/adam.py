"""Adam updates over flat parameter vectors.

Plain functional implementation: adam_step takes and returns state, never
mutating its arguments, so a training loop can snapshot parameters at any
point without defensive copies. Scalar factors are python floats so float32
vectors stay float32.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class TrainingDiverged(ArithmeticError):
    """Raised when a gradient or loss stops being finite."""


@dataclass(eq=False)
class AdamState:
    """First/second moment accumulators plus the step counter."""

    step: int
    m: np.ndarray
    v: np.ndarray
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.step < 0:
            raise ValueError("step must be >= 0")
        if not self.lr > 0:
            raise ValueError(f"lr must be positive, got {self.lr!r}")
        if not 0.0 <= self.beta1 < 1.0 or not 0.0 <= self.beta2 < 1.0:
            raise ValueError("betas must lie in [0, 1)")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps!r}")
        if self.m.shape != self.v.shape:
            raise ValueError("moment vectors must have identical shape")


def fresh_state(
    params: np.ndarray,
    lr: float = 2e-4,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> AdamState:
    """Zeroed moments matching the parameter vector's shape and dtype."""
    return AdamState(
        step=0,
        m=np.zeros_like(params),
        v=np.zeros_like(params),
        lr=lr,
        beta1=beta1,
        beta2=beta2,
        eps=eps,
    )


def adam_step(
    state: AdamState, params: np.ndarray, grads: np.ndarray
) -> tuple[np.ndarray, AdamState]:
    """One update: returns (new_params, new_state).

    Bias-corrected moments with eps added outside the square root:
    theta <- theta - lr * m_hat / (sqrt(v_hat) + eps).
    """
    if params.shape != grads.shape or params.shape != state.m.shape:
        raise ValueError(
            f"shape mismatch: params {params.shape}, grads {grads.shape}, state {state.m.shape}"
        )
    if not np.all(np.isfinite(grads)):
        bad = int(np.flatnonzero(~np.isfinite(grads))[0])
        raise TrainingDiverged(
            f"non-finite gradient at parameter {bad} on step {state.step + 1}"
        )
    t = state.step + 1
    b1 = float(state.beta1)
    b2 = float(state.beta2)
    m = b1 * state.m + (1.0 - b1) * grads
    v = b2 * state.v + (1.0 - b2) * (grads * grads)
    m_hat = m * (1.0 / (1.0 - b1**t))
    v_hat = v * (1.0 / (1.0 - b2**t))
    new_params = params - float(state.lr) * m_hat / (np.sqrt(v_hat) + float(state.eps))
    new_state = AdamState(
        step=t, m=m, v=v, lr=state.lr, beta1=state.beta1, beta2=state.beta2, eps=state.eps
    )
    return new_params, new_state
