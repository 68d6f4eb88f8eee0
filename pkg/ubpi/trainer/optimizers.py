from typing import Protocol

from numpy.typing import NDArray

from ubpi.errors.internal import InternalError
from ubpi.schemas.train import OptimizerKind, TrainConfig

import numpy as np


Parameters = dict[str, NDArray[np.float64]]


class Optimizer(Protocol):
    def step(self, params: Parameters, grads: Parameters) -> None:
        """Update `params` in place from `grads`."""
        ...


class SGD:
    """Plain gradient descent: p <- p - lr * g."""

    def __init__(self, lr: float) -> None:
        self.lr = lr

    def step(self, params: Parameters, grads: Parameters) -> None:
        for k in params:
            params[k] -= self.lr * grads[k]


class Adam:
    """Adaptive moment estimation with bias-corrected moments."""

    def __init__(
        self,
        lr: float = 1e-2,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ) -> None:
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon

        self.m: Parameters = {}
        self.v: Parameters = {}
        self.t = 0

    def step(self, params: Parameters, grads: Parameters) -> None:
        self.t += 1

        # bias corrections are shared by every parameter of this step
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        step_size = self.lr / bc1

        for k in params:
            g = grads[k]

            if k not in self.m:
                self.m[k] = np.zeros_like(params[k])
                self.v[k] = np.zeros_like(params[k])

            self.m[k] *= self.beta1
            self.m[k] += (1.0 - self.beta1) * g

            self.v[k] *= self.beta2
            self.v[k] += (1.0 - self.beta2) * (g * g)

            denom = np.sqrt(self.v[k] * (1.0 / bc2)) + self.epsilon
            params[k] -= step_size * self.m[k] / denom


def make_optimizer(config: TrainConfig) -> Optimizer:
    match config.optimizer:
        case OptimizerKind.SGD:
            return SGD(config.learning_rate)
        case OptimizerKind.ADAM:
            return Adam(config.learning_rate)
        case _:
            raise InternalError(
                f"no optimizer for kind {config.optimizer!r}"
            )


def clip_gradients(grads: Parameters, max_norm: float) -> Parameters:
    """Rescale all gradients together so their global norm <= max_norm.

    Only the norm changes; the direction is preserved.
    """

    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))

    if norm <= max_norm or norm == 0.0:
        return grads

    scale = max_norm / norm

    return {k: g * scale for k, g in grads.items()}
