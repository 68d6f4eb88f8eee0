from typing import Callable

from hypothesis import given, settings
from hypothesis import strategies as st

from ubpi import autodiff
from ubpi.autodiff import Node, OpKind
from ubpi.errors import InvalidArgumentError
from ubpi.errors.numeric import DomainError

import math
import numpy as np
import pytest


def test_forward_examples():
    assert autodiff.forward_op(OpKind.ADD, 2.0, 3.0).item() == 5.0
    assert autodiff.forward_op("log", 1.0).item() == 0.0
    assert autodiff.forward_op(OpKind.SIGMOID, 0.0).item() == 0.5


def test_forward_rejects_unknown_op_and_wrong_arity():
    with pytest.raises(InvalidArgumentError):
        autodiff.forward_op("softmax", 1.0)

    with pytest.raises(InvalidArgumentError):
        autodiff.forward_op(OpKind.ADD, 1.0)

    with pytest.raises(InvalidArgumentError):
        autodiff.forward_op(OpKind.EXP, 1.0, 2.0)


def test_domain_errors():
    with pytest.raises(DomainError):
        autodiff.log(0.0)

    with pytest.raises(DomainError):
        autodiff.log(-1.0)

    with pytest.raises(DomainError):
        autodiff.div(1.0, 0.0)

    with pytest.raises(DomainError):
        autodiff.add(float("nan"), 1.0)

    with pytest.raises(DomainError):
        autodiff.exp(1000.0)


def test_backward_examples():
    x = Node(3.0)
    autodiff.backward(autodiff.square(x))
    assert x.grad == 6.0

    x = Node(2.0)
    autodiff.backward(autodiff.log(x))
    assert x.grad == 0.5

    x = Node(0.0)
    autodiff.backward(autodiff.sigmoid(x) * autodiff.sigmoid(-x))
    assert abs(float(x.grad)) < 1e-15


def test_backward_needs_scalar_root():
    x = Node(np.array([1.0, 2.0]))

    with pytest.raises(InvalidArgumentError):
        autodiff.backward(x * 2.0)


def test_gradients_accumulate_until_zeroed():
    x = Node(3.0)
    autodiff.backward(autodiff.square(x))
    autodiff.backward(autodiff.square(x))
    assert x.grad == 12.0

    autodiff.zero_grad([x])
    assert x.grad == 0.0


def test_shared_node_gets_the_sum_of_its_paths():
    x = Node(2.0)
    y = x * x + x  # dy/dx = 2x + 1
    gradients = autodiff.backward(y)

    assert gradients[x] == 5.0


def test_unreachable_nodes_keep_zero_gradient():
    x, unused = Node(1.0), Node(4.0)
    autodiff.backward(autodiff.exp(x))

    assert unused.grad == 0.0


def test_relu_and_maximum_tie_conventions():
    x = Node(0.0)
    autodiff.backward(autodiff.relu(x))
    assert x.grad == 0.0

    a, b = Node(1.0), Node(1.0)
    autodiff.backward(autodiff.maximum(a, b))
    assert a.grad == 0.0
    assert b.grad == 1.0


def test_broadcast_gradients_match_operand_shapes():
    w = Node(np.ones((3, 2)))
    b = Node(np.zeros(2))
    x = np.arange(6.0).reshape(2, 3)

    out = autodiff.sum(autodiff.matmul(x, w) + b)
    autodiff.backward(out)

    assert b.grad.shape == (2,)
    np.testing.assert_allclose(b.grad, [2.0, 2.0])
    np.testing.assert_allclose(w.grad, x.T @ np.ones((2, 2)))


def test_index_scatters_gradient():
    x = Node(np.array([[1.0, 2.0], [3.0, 4.0]]))
    autodiff.backward(autodiff.sum(x[:, 1]))

    np.testing.assert_array_equal(x.grad, [[0.0, 1.0], [0.0, 1.0]])


# smooth building blocks; the kinks of relu/max are left out of the
# finite difference comparison
UNARY: list[Callable[[Node, Node], Node]] = [
    lambda v, y: autodiff.tanh(v),
    lambda v, y: autodiff.sigmoid(v),
    lambda v, y: autodiff.square(autodiff.tanh(v)),
    lambda v, y: autodiff.log(1.0 + autodiff.square(v)),
    lambda v, y: autodiff.exp(autodiff.tanh(v)),
    lambda v, y: -v,
    lambda v, y: v * autodiff.tanh(y),
    lambda v, y: v + y,
    lambda v, y: v - 0.5 * y,
    lambda v, y: v / (2.0 + autodiff.tanh(y)),
]


def _build(ops: list[int], x: Node, y: Node) -> Node:
    v = x

    for op in ops:
        v = UNARY[op](v, y)

    return v


def _value(ops: list[int], x: float, y: float) -> float:
    return _build(ops, Node(x), Node(y)).item()


@settings(max_examples=100, deadline=None)
@given(
    ops=st.lists(st.integers(0, len(UNARY) - 1), min_size=1, max_size=6),
    x=st.floats(-2.0, 2.0),
    y=st.floats(-2.0, 2.0),
)
def test_gradients_match_central_differences(ops, x, y):
    xn, yn = Node(x), Node(y)
    autodiff.backward(_build(ops, xn, yn))

    h = 1e-5

    for analytic, numeric in (
        (
            float(xn.grad),
            (_value(ops, x + h, y) - _value(ops, x - h, y)) / (2 * h),
        ),
        (
            float(yn.grad),
            (_value(ops, x, y + h) - _value(ops, x, y - h)) / (2 * h),
        ),
    ):
        assert math.isclose(analytic, numeric, rel_tol=1e-4, abs_tol=1e-7)


@given(st.floats(0.1, 5.0))
def test_relu_gradient_away_from_zero(x):
    node = Node(x)
    autodiff.backward(autodiff.relu(node) + autodiff.relu(-node))

    assert node.grad == 1.0
