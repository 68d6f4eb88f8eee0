"""A small tape-style reverse-mode differentiation engine.

Every `Node` holds a float64 numpy array (0-d for scalars), the nodes it was
computed from and one vector-Jacobian product per parent. A graph is built
fresh for every mini-batch and thrown away after `backward`.
"""

from enum import unique

from ubpi._compat import StrEnum
from typing import Callable, Iterable, Sequence

from numpy.typing import ArrayLike, NDArray

from ubpi.errors import InvalidArgumentError
from ubpi.errors.numeric import DomainError

import numpy as np


Array = NDArray[np.float64]
VectorJacobian = Callable[[Array], Array]


@unique
class OpKind(StrEnum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"
    NEG = "neg"
    EXP = "exp"
    LOG = "log"
    TANH = "tanh"
    SIGMOID = "sigmoid"
    RELU = "relu"
    MAX = "max"
    SQUARE = "square"
    MEAN = "mean"
    SUM = "sum"
    MATMUL = "matmul"
    INDEX = "index"


class Node:
    """A value in the computation graph together with its gradient slot."""

    __slots__ = ("value", "grad", "parents", "vjps", "op")

    value: Array
    grad: Array
    parents: tuple["Node", ...]
    vjps: tuple[VectorJacobian, ...]
    op: str | None

    # make numpy defer to the reflected operators below
    __array_ufunc__ = None

    def __init__(
        self,
        value: ArrayLike,
        parents: Sequence["Node"] = (),
        vjps: Sequence[VectorJacobian] = (),
        op: str | None = None,
    ) -> None:
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)
        self.parents = tuple(parents)
        self.vjps = tuple(vjps)
        self.op = op

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    @property
    def is_leaf(self) -> bool:
        return not self.parents

    def item(self) -> float:
        return float(self.value)

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.value)

    def __repr__(self) -> str:
        return f"Node(op={self.op!r}, value={self.value!r})"

    def __add__(self, other: "Operand") -> "Node":
        return add(self, other)

    def __radd__(self, other: "Operand") -> "Node":
        return add(other, self)

    def __sub__(self, other: "Operand") -> "Node":
        return sub(self, other)

    def __rsub__(self, other: "Operand") -> "Node":
        return sub(other, self)

    def __mul__(self, other: "Operand") -> "Node":
        return mul(self, other)

    def __rmul__(self, other: "Operand") -> "Node":
        return mul(other, self)

    def __truediv__(self, other: "Operand") -> "Node":
        return div(self, other)

    def __rtruediv__(self, other: "Operand") -> "Node":
        return div(other, self)

    def __neg__(self) -> "Node":
        return neg(self)

    def __matmul__(self, other: "Operand") -> "Node":
        return matmul(self, other)

    def __rmatmul__(self, other: "Operand") -> "Node":
        return matmul(other, self)

    def __getitem__(self, key: object) -> "Node":
        return index(self, key)


Operand = Node | ArrayLike


def lift(x: Operand) -> Node:
    """Wrap constants as leaf nodes; nodes pass through."""

    if isinstance(x, Node):
        return x

    return Node(x)


def _unbroadcast(grad: Array, shape: tuple[int, ...]) -> Array:
    """Sum `grad` down to `shape`, undoing numpy broadcasting."""

    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)

    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)

    return grad.reshape(shape)


def _check_finite(kind: OpKind, *nodes: Node) -> None:
    for node in nodes:
        if not np.all(np.isfinite(node.value)):
            raise DomainError(f"{kind}: non-finite input")


def _result(
    kind: OpKind,
    value: Array,
    parents: Sequence[Node],
    vjps: Sequence[VectorJacobian],
) -> Node:
    if not np.all(np.isfinite(value)):
        raise DomainError(f"{kind}: result is not finite")

    return Node(value, parents, vjps, op=str(kind))


def add(a: Operand, b: Operand) -> Node:
    a, b = lift(a), lift(b)
    _check_finite(OpKind.ADD, a, b)

    return _result(
        OpKind.ADD,
        a.value + b.value,
        (a, b),
        (
            lambda g: _unbroadcast(g, a.shape),
            lambda g: _unbroadcast(g, b.shape),
        ),
    )


def sub(a: Operand, b: Operand) -> Node:
    a, b = lift(a), lift(b)
    _check_finite(OpKind.SUB, a, b)

    return _result(
        OpKind.SUB,
        a.value - b.value,
        (a, b),
        (
            lambda g: _unbroadcast(g, a.shape),
            lambda g: _unbroadcast(-g, b.shape),
        ),
    )


def mul(a: Operand, b: Operand) -> Node:
    a, b = lift(a), lift(b)
    _check_finite(OpKind.MUL, a, b)

    return _result(
        OpKind.MUL,
        a.value * b.value,
        (a, b),
        (
            lambda g: _unbroadcast(g * b.value, a.shape),
            lambda g: _unbroadcast(g * a.value, b.shape),
        ),
    )


def div(a: Operand, b: Operand) -> Node:
    a, b = lift(a), lift(b)
    _check_finite(OpKind.DIV, a, b)

    if np.any(b.value == 0.0):
        raise DomainError("div: division by zero")

    return _result(
        OpKind.DIV,
        a.value / b.value,
        (a, b),
        (
            lambda g: _unbroadcast(g / b.value, a.shape),
            lambda g: _unbroadcast(
                -g * a.value / (b.value * b.value), b.shape
            ),
        ),
    )


def neg(a: Operand) -> Node:
    a = lift(a)
    _check_finite(OpKind.NEG, a)

    return _result(OpKind.NEG, -a.value, (a,), (lambda g: -g,))


def exp(a: Operand) -> Node:
    a = lift(a)
    _check_finite(OpKind.EXP, a)

    with np.errstate(over="ignore"):
        out = np.exp(a.value)

    return _result(OpKind.EXP, out, (a,), (lambda g: g * out,))


def log(a: Operand) -> Node:
    a = lift(a)
    _check_finite(OpKind.LOG, a)

    if np.any(a.value <= 0.0):
        raise DomainError("log: argument must be positive")

    return _result(
        OpKind.LOG, np.log(a.value), (a,), (lambda g: g / a.value,)
    )


def tanh(a: Operand) -> Node:
    a = lift(a)
    _check_finite(OpKind.TANH, a)
    out = np.tanh(a.value)

    return _result(OpKind.TANH, out, (a,), (lambda g: g * (1.0 - out**2),))


def sigmoid(a: Operand) -> Node:
    a = lift(a)
    _check_finite(OpKind.SIGMOID, a)
    # tanh form does not overflow for large |x|
    out = 0.5 * (1.0 + np.tanh(0.5 * a.value))

    return _result(
        OpKind.SIGMOID, out, (a,), (lambda g: g * out * (1.0 - out),)
    )


def relu(a: Operand) -> Node:
    """max(0, a) with subgradient 0 at exactly 0."""

    a = lift(a)
    _check_finite(OpKind.RELU, a)
    mask = (a.value > 0.0).astype(np.float64)

    return _result(
        OpKind.RELU, a.value * mask, (a,), (lambda g: g * mask,)
    )


def maximum(a: Operand, b: Operand) -> Node:
    """Elementwise max; on ties the gradient goes to `b`."""

    a, b = lift(a), lift(b)
    _check_finite(OpKind.MAX, a, b)
    a_wins = (a.value > b.value).astype(np.float64)

    return _result(
        OpKind.MAX,
        np.maximum(a.value, b.value),
        (a, b),
        (
            lambda g: _unbroadcast(g * a_wins, a.shape),
            lambda g: _unbroadcast(g * (1.0 - a_wins), b.shape),
        ),
    )


def square(a: Operand) -> Node:
    a = lift(a)
    _check_finite(OpKind.SQUARE, a)

    return _result(
        OpKind.SQUARE, a.value * a.value, (a,), (lambda g: 2.0 * g * a.value,)
    )


def sum(a: Operand) -> Node:
    a = lift(a)
    _check_finite(OpKind.SUM, a)

    return _result(
        OpKind.SUM,
        np.asarray(a.value.sum()),
        (a,),
        (lambda g: np.broadcast_to(g, a.shape).copy(),),
    )


def mean(a: Operand) -> Node:
    a = lift(a)
    _check_finite(OpKind.MEAN, a)

    if a.value.size == 0:
        raise DomainError("mean: empty input")

    size = a.value.size

    return _result(
        OpKind.MEAN,
        np.asarray(a.value.mean()),
        (a,),
        (lambda g: np.broadcast_to(g / size, a.shape).copy(),),
    )


def matmul(a: Operand, b: Operand) -> Node:
    a, b = lift(a), lift(b)
    _check_finite(OpKind.MATMUL, a, b)

    if a.value.ndim != 2 or b.value.ndim != 2:
        raise DomainError("matmul: both operands must be matrices")

    if a.shape[1] != b.shape[0]:
        raise DomainError(f"matmul: shapes {a.shape} and {b.shape} differ")

    return _result(
        OpKind.MATMUL,
        a.value @ b.value,
        (a, b),
        (lambda g: g @ b.value.T, lambda g: a.value.T @ g),
    )


def index(a: Operand, key: object) -> Node:
    a = lift(a)
    _check_finite(OpKind.INDEX, a)

    def vjp(g: Array) -> Array:
        out = np.zeros_like(a.value)
        np.add.at(out, key, g)  # type:ignore
        return out

    return _result(
        OpKind.INDEX,
        np.asarray(a.value[key]),  # type:ignore
        (a,),
        (vjp,),
    )


_UNARY: dict[OpKind, Callable[[Operand], Node]] = {
    OpKind.NEG: neg,
    OpKind.EXP: exp,
    OpKind.LOG: log,
    OpKind.TANH: tanh,
    OpKind.SIGMOID: sigmoid,
    OpKind.RELU: relu,
    OpKind.SQUARE: square,
    OpKind.MEAN: mean,
    OpKind.SUM: sum,
}

_BINARY: dict[OpKind, Callable[[Operand, Operand], Node]] = {
    OpKind.ADD: add,
    OpKind.SUB: sub,
    OpKind.MUL: mul,
    OpKind.DIV: div,
    OpKind.MAX: maximum,
    OpKind.MATMUL: matmul,
}


def forward_op(kind: OpKind | str, *inputs: Operand) -> Node:
    """Apply the operation named by `kind` to `inputs`.

    Raises:
        InvalidArgumentError: if `kind` is unknown or the arity is wrong.
        DomainError: if an input is outside of the operation's domain.
    """

    try:
        kind = OpKind(kind)
    except ValueError:
        raise InvalidArgumentError(f"unknown operation {kind!r}")

    if kind in _UNARY:
        if len(inputs) != 1:
            raise InvalidArgumentError(f"{kind} takes exactly one input")

        return _UNARY[kind](inputs[0])

    if kind in _BINARY:
        if len(inputs) != 2:
            raise InvalidArgumentError(f"{kind} takes exactly two inputs")

        return _BINARY[kind](inputs[0], inputs[1])

    raise InvalidArgumentError(f"{kind} cannot be applied through forward_op")


def topological_order(root: Node) -> list[Node]:
    """Nodes reachable from `root`, parents before children."""

    order: list[Node] = []
    visited: set[int] = set()
    stack: list[tuple[Node, bool]] = [(root, False)]

    while stack:
        node, expanded = stack.pop()

        if expanded:
            order.append(node)
            continue

        if id(node) in visited:
            continue

        visited.add(id(node))
        stack.append((node, True))

        for parent in node.parents:
            if id(parent) not in visited:
                stack.append((parent, False))

    return order


def backward(root: Node) -> dict[Node, Array]:
    """Propagate d(root)/d(node) to every node reachable from `root`.

    Gradients are accumulated into `Node.grad`; call `zero_grad` on leaves
    that are reused across passes. Nodes that are not reachable keep their
    gradient untouched (zero unless accumulated before).

    Returns:
        The gradient contributed by this pass for every reachable node.

    Raises:
        InvalidArgumentError: if `root` is not a scalar.
    """

    if root.value.size != 1:
        raise InvalidArgumentError(
            f"backward needs a scalar root, got shape {root.shape}"
        )

    adjoints: dict[int, Array] = {id(root): np.ones_like(root.value)}
    order = topological_order(root)
    gradients: dict[Node, Array] = {}

    for node in reversed(order):
        adjoint = adjoints.pop(id(node), None)

        if adjoint is None:
            adjoint = np.zeros_like(node.value)

        gradients[node] = adjoint
        node.grad = node.grad + adjoint

        for parent, vjp in zip(node.parents, node.vjps):
            contribution = vjp(adjoint)

            if id(parent) in adjoints:
                adjoints[id(parent)] = adjoints[id(parent)] + contribution
            else:
                adjoints[id(parent)] = contribution

    return gradients


def zero_grad(nodes: Iterable[Node]) -> None:
    for node in nodes:
        node.zero_grad()
