"""Adam optimizer over named parameter collections."""

from __future__ import annotations

import numpy as np

from .tensor import Tensor


class AdamState:
    """First/second-moment buffers plus the shared step counter ``t``.

    Buffers are created lazily on the first step so the state can be
    constructed before the parameter shapes are known.
    """

    def __init__(self):
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}
        self.t: int = 0


class Adam:
    """Adam with its own state, bound to a learning rate.

    ``step`` reads each parameter's ``.grad`` buffer; callers zero those
    explicitly between steps.
    """

    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999,
                 epsilon: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.state = AdamState()

    def step(self, params: dict[str, Tensor]) -> None:
        grads = {name: p.grad for name, p in params.items()}
        adam_step(params, grads, self.state, self.lr,
                  self.beta1, self.beta2, self.epsilon)


def adam_step(params: dict[str, Tensor], grads: dict[str, np.ndarray],
              state: AdamState, lr: float, beta1: float = 0.9,
              beta2: float = 0.999, epsilon: float = 1e-8) -> None:
    """One bias-corrected Adam update, applied to ``params`` in place."""
    state.t += 1
    b1 = np.float32(beta1)
    b2 = np.float32(beta2)
    bc1 = np.float32(1.0 - beta1 ** state.t)
    bc2 = np.float32(1.0 - beta2 ** state.t)
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.data.shape:
            raise ValueError(
                f"adam_step: gradient shape {g.shape} does not match "
                f"parameter '{name}' shape {p.data.shape}")
        if name not in state.m:
            state.m[name] = np.zeros_like(p.data)
            state.v[name] = np.zeros_like(p.data)
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p.data -= np.float32(lr) * (m / bc1) / (np.sqrt(v / bc2) + np.float32(epsilon))
