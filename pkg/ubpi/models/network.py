"""The two-output feedforward network.

One hidden ReLU layer followed by a linear layer with two outputs: column 0
is the lower bound, column 1 the upper bound. The ordering of the bounds is
not enforced by the architecture; crossed intervals are monitored through
the crossing rate instead.
"""

from dataclasses import dataclass
from typing import NamedTuple

from numpy.typing import ArrayLike, NDArray

from ubpi import autodiff
from ubpi.autodiff import Node
from ubpi.errors import InvalidArgumentError

import numpy as np


PARAMETER_NAMES = ("w1", "b1", "w2", "b2")


class Interval(NamedTuple):
    lower: float
    upper: float


@dataclass(frozen=True, eq=False)
class Intervals:
    """Per-sample interval bounds stored column-wise."""

    lower: NDArray[np.float64]
    upper: NDArray[np.float64]

    def __post_init__(self) -> None:
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise InvalidArgumentError(
                "lower and upper bounds must be vectors of equal length"
            )

    @classmethod
    def of(cls, lower: ArrayLike, upper: ArrayLike) -> "Intervals":
        return cls(
            np.asarray(lower, dtype=np.float64).reshape(-1),
            np.asarray(upper, dtype=np.float64).reshape(-1),
        )

    @property
    def n(self) -> int:
        return int(self.lower.shape[0])

    @property
    def width(self) -> NDArray[np.float64]:
        return self.upper - self.lower

    @property
    def midpoint(self) -> NDArray[np.float64]:
        return (self.lower + self.upper) / 2.0

    @property
    def crossed(self) -> NDArray[np.bool_]:
        return self.upper < self.lower

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> Interval:
        return Interval(float(self.lower[i]), float(self.upper[i]))


def midpoint(interval: Interval | Intervals) -> float | NDArray[np.float64]:
    """The point estimate (lower + upper) / 2."""

    if isinstance(interval, Intervals):
        return interval.midpoint

    return (interval.lower + interval.upper) / 2.0


@dataclass(eq=False)
class NetworkParams:
    """Weights and biases of the network; owned by one trainer at a time."""

    w1: NDArray[np.float64]
    b1: NDArray[np.float64]
    w2: NDArray[np.float64]
    b2: NDArray[np.float64]

    @property
    def input_dim(self) -> int:
        return int(self.w1.shape[0])

    @property
    def hidden(self) -> int:
        return int(self.w1.shape[1])

    def as_dict(self) -> dict[str, NDArray[np.float64]]:
        return {name: getattr(self, name) for name in PARAMETER_NAMES}

    def copy(self) -> "NetworkParams":
        return NetworkParams(
            **{name: array.copy() for name, array in self.as_dict().items()}
        )

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.as_dict().values())

    def equals(self, other: "NetworkParams") -> bool:
        """Bit-for-bit equality of every parameter."""

        return all(
            a.shape == b.shape and a.tobytes() == b.tobytes()
            for a, b in zip(self.as_dict().values(), other.as_dict().values())
        )


def init_network(
    input_dim: int, hidden: int, seed: int, bias_offset: float = 1.0
) -> NetworkParams:
    """Draw initial parameters.

    Weights and hidden biases are uniform in +-sqrt(6 / (fan_in + fan_out))
    of their layer, so the ReLU kinks start scattered over the inputs rather
    than all at the origin. The output biases start at
    (-bias_offset, +bias_offset) so that intervals begin wide and shrink
    during training.

    Raises:
        InvalidArgumentError: if a dimension is smaller than one.
    """

    if input_dim < 1 or hidden < 1:
        raise InvalidArgumentError(
            f"network dimensions must be positive, got "
            f"input_dim={input_dim}, hidden={hidden}"
        )

    rng = np.random.default_rng(seed)

    def glorot(
        fan_in: int, fan_out: int, *shape: int
    ) -> NDArray[np.float64]:
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-limit, limit, size=shape or (fan_in, fan_out))

    w1 = glorot(input_dim, hidden)
    w2 = glorot(hidden, 2)
    b1 = glorot(input_dim, hidden, hidden)

    return NetworkParams(
        w1=w1,
        b1=b1,
        w2=w2,
        b2=np.array([-bias_offset, bias_offset], dtype=np.float64),
    )


def parameter_nodes(params: NetworkParams) -> dict[str, Node]:
    """Fresh leaf nodes over copies of the parameters for one tape."""

    return {
        name: Node(array.copy()) for name, array in params.as_dict().items()
    }


def _check_features(
    params: NetworkParams, features: ArrayLike
) -> NDArray[np.float64]:
    x = np.asarray(features, dtype=np.float64)

    if x.ndim == 1:
        x = x.reshape(1, -1)

    if x.ndim != 2 or x.shape[1] != params.input_dim:
        raise InvalidArgumentError(
            f"expected {params.input_dim} features per sample, got shape "
            f"{x.shape}"
        )

    return x


def forward(
    nodes: dict[str, Node], features: ArrayLike
) -> tuple[Node, Node]:
    """The differentiable forward pass: (lower, upper) bound nodes."""

    x = np.asarray(features, dtype=np.float64)

    if x.ndim != 2 or x.shape[1] != nodes["w1"].shape[0]:
        raise InvalidArgumentError(
            f"expected {nodes['w1'].shape[0]} features per sample, got "
            f"shape {x.shape}"
        )

    hidden = autodiff.relu(autodiff.matmul(x, nodes["w1"]) + nodes["b1"])
    out = autodiff.matmul(hidden, nodes["w2"]) + nodes["b2"]

    return out[:, 0], out[:, 1]


def predict(params: NetworkParams, features: ArrayLike) -> Intervals:
    """Per-sample bounds, in the units the network was trained in."""

    x = _check_features(params, features)
    hidden = np.maximum(x @ params.w1 + params.b1, 0.0)
    out = hidden @ params.w2 + params.b2

    return Intervals(out[:, 0].copy(), out[:, 1].copy())
