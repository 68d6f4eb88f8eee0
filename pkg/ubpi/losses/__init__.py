"""Differentiable interval losses.

Every function accepts bounds either as autodiff nodes (during training) or
as plain arrays/floats (for evaluation and tests) and returns nodes, so the
same code produces both the value and its gradient.

The coverage indicator is always the sigmoid-softened one while training;
hard coverage lives in `ubpi.metrics`.
"""

from dataclasses import dataclass

from numpy.typing import ArrayLike, NDArray

from ubpi import autodiff
from ubpi.autodiff import Node, Operand
from ubpi.errors import InvalidArgumentError
from ubpi.errors.internal import InternalError
from ubpi.schemas.loss import LossBreakdown, LossConfig, LossKind

import numpy as np


@dataclass(frozen=True)
class LossResult:
    """The differentiable total plus the scalar terms it was built from."""

    total: Node
    breakdown: LossBreakdown


def _as_targets(ys: ArrayLike) -> NDArray[np.float64]:
    return np.asarray(ys, dtype=np.float64).reshape(-1)


def _bounds(
    lower: Operand, upper: Operand, ys: ArrayLike | None = None
) -> tuple[Node, Node]:
    lower, upper = autodiff.lift(lower), autodiff.lift(upper)

    if lower.shape != upper.shape:
        raise InvalidArgumentError(
            f"bound shapes differ: {lower.shape} and {upper.shape}"
        )

    size = lower.value.size

    if size < 1:
        raise InvalidArgumentError("the batch is empty")

    if ys is not None and _as_targets(ys).size != size:
        raise InvalidArgumentError(
            f"{size} intervals but {_as_targets(ys).size} targets"
        )

    return lower, upper


def soft_coverage(
    lower: Operand, upper: Operand, ys: ArrayLike, s: float
) -> Node:
    """sigmoid(s (upper - y)) * sigmoid(s (y - lower)), elementwise."""

    if not s > 0.0:
        raise InvalidArgumentError(f"softening factor must be > 0, got {s}")

    lower, upper = autodiff.lift(lower), autodiff.lift(upper)
    y = np.asarray(ys, dtype=np.float64).reshape(lower.shape)

    return autodiff.sigmoid(s * (upper - y)) * autodiff.sigmoid(
        s * (y - lower)
    )


def picp_soft(
    lower: Operand, upper: Operand, ys: ArrayLike, s: float
) -> Node:
    """Mean softened coverage over the batch."""

    lower, upper = _bounds(lower, upper, ys)

    return autodiff.mean(soft_coverage(lower, upper, ys, s))


def mpiw(lower: Operand, upper: Operand) -> Node:
    """Mean width; negative when intervals are crossed."""

    lower, upper = _bounds(lower, upper)

    return autodiff.mean(upper - lower)


def mse_midpoint(lower: Operand, upper: Operand, ys: ArrayLike) -> Node:
    """Mean squared error of the interval midpoints."""

    lower, upper = _bounds(lower, upper, ys)
    y = _as_targets(ys).reshape(lower.shape)

    return autodiff.mean(autodiff.square((lower + upper) / 2.0 - y))


def uncertainty_term(
    mse: Operand, width: Operand, n: int, mpiw_floor: float = 1e-6
) -> Node:
    """(n / 2) (mse / M + log M) with M = max(width, mpiw_floor).

    The floor is straight-through: below it the value is clamped but the
    width still receives the gradient taken at M = mpiw_floor, so crossed
    or collapsed intervals are pushed back open whenever mse > mpiw_floor.
    """

    if n < 1:
        raise InvalidArgumentError("the batch size n must be at least 1")

    width = autodiff.lift(width)
    shift = np.maximum(width.value, mpiw_floor) - width.value
    floored = width + autodiff.Node(shift)

    return (n / 2.0) * (mse / floored + autodiff.log(floored))


def loss_ue(
    lower: Operand,
    upper: Operand,
    ys: ArrayLike,
    n: int | None = None,
    mpiw_floor: float = 1e-6,
) -> Node:
    """The uncertainty-estimation term over one mini-batch.

    :param n: The mini-batch size; defaults to the number of samples.
    """

    lower, upper = _bounds(lower, upper, ys)

    return uncertainty_term(
        mse_midpoint(lower, upper, ys),
        mpiw(lower, upper),
        lower.value.size if n is None else n,
        mpiw_floor,
    )


def loss_pi(picp: Operand, confidence_level: float) -> Node:
    """max(0, P_c - picp)^2: zero once the coverage target is met."""

    picp = autodiff.lift(picp)

    if not np.all((picp.value >= 0.0) & (picp.value <= 1.0)):
        raise InvalidArgumentError(f"coverage {picp.value} is not in [0, 1]")

    return autodiff.square(autodiff.relu(confidence_level - picp))


def _breakdown(
    kind: LossKind,
    config: LossConfig,
    total: Node,
    l_ue: Node,
    l_pi: Node,
    mse: Node,
    width: Node,
    picp: Node,
) -> LossBreakdown:
    return LossBreakdown(
        kind=kind,
        lambda_=config.lambda_,
        total=total.item(),
        l_ue=l_ue.item(),
        l_pi=l_pi.item(),
        mse=mse.item(),
        mpiw=width.item(),
        picp_soft=picp.item(),
    )


@dataclass(frozen=True)
class _Terms:
    mse: Node
    width: Node
    picp: Node
    l_ue: Node
    l_pi: Node


def _terms(
    lower: Operand, upper: Operand, ys: ArrayLike, config: LossConfig
) -> _Terms:
    lower, upper = _bounds(lower, upper, ys)
    n = lower.value.size

    mse = mse_midpoint(lower, upper, ys)
    width = mpiw(lower, upper)
    picp = picp_soft(lower, upper, ys, config.soften)

    return _Terms(
        mse=mse,
        width=width,
        picp=picp,
        l_ue=uncertainty_term(mse, width, n, config.mpiw_floor),
        l_pi=loss_pi(picp, config.confidence_level),
    )


def hybrid_loss(
    lower: Operand, upper: Operand, ys: ArrayLike, config: LossConfig
) -> LossResult:
    """L = L_UE + lambda L_PI.

    Built in order: midpoints, MSE, MPIW, softened coverage, soft PICP,
    L_UE, L_PI, then the weighted sum.
    """

    terms = _terms(lower, upper, ys, config)
    total = terms.l_ue + config.lambda_ * terms.l_pi

    return LossResult(
        total,
        _breakdown(
            LossKind.UBPI,
            config,
            total,
            terms.l_ue,
            terms.l_pi,
            terms.mse,
            terms.width,
            terms.picp,
        ),
    )


def lube_loss(
    lower: Operand,
    upper: Operand,
    ys: ArrayLike,
    config: LossConfig,
    target_range: float,
) -> LossResult:
    """(MPIW / r) (1 + exp(lambda max(0, P_c - PICP))), soft PICP.

    :param target_range: The numerical range r of the target variable.
    """

    if not target_range > 0.0:
        raise InvalidArgumentError(
            f"the target range must be positive, got {target_range}"
        )

    terms = _terms(lower, upper, ys, config)
    deficit = autodiff.relu(config.confidence_level - terms.picp)
    total = (terms.width / target_range) * (
        1.0 + autodiff.exp(config.lambda_ * deficit)
    )

    return LossResult(
        total,
        _breakdown(
            LossKind.LUBE,
            config,
            total,
            terms.l_ue,
            terms.l_pi,
            terms.mse,
            terms.width,
            terms.picp,
        ),
    )


def mbpep_loss(
    lower: Operand, upper: Operand, ys: ArrayLike, config: LossConfig
) -> LossResult:
    """MPIW + lambda ReLU(P_c - PICP), soft PICP."""

    terms = _terms(lower, upper, ys, config)
    total = terms.width + config.lambda_ * autodiff.relu(
        config.confidence_level - terms.picp
    )

    return LossResult(
        total,
        _breakdown(
            LossKind.MBPEP,
            config,
            total,
            terms.l_ue,
            terms.l_pi,
            terms.mse,
            terms.width,
            terms.picp,
        ),
    )


def pinball_loss(quantile_pred: Operand, ys: ArrayLike, tau: float) -> Node:
    """Elementwise quantile loss.

    tau (y - q) when y >= q, otherwise (1 - tau) (q - y).
    """

    if not 0.0 < tau < 1.0:
        raise InvalidArgumentError(f"quantile must be in (0, 1), got {tau}")

    q = autodiff.lift(quantile_pred)
    y = np.asarray(ys, dtype=np.float64).reshape(q.shape)

    return tau * autodiff.relu(y - q) + (1.0 - tau) * autodiff.relu(q - y)


def quantile_loss(
    lower: Operand, upper: Operand, ys: ArrayLike, config: LossConfig
) -> LossResult:
    """Mean pinball loss of both heads at the quantiles matching P_c."""

    terms = _terms(lower, upper, ys, config)
    tau_lower, tau_upper = config.quantiles
    lower, upper = autodiff.lift(lower), autodiff.lift(upper)

    total = autodiff.mean(pinball_loss(lower, ys, tau_lower)) + autodiff.mean(
        pinball_loss(upper, ys, tau_upper)
    )

    return LossResult(
        total,
        _breakdown(
            LossKind.PINBALL,
            config,
            total,
            terms.l_ue,
            terms.l_pi,
            terms.mse,
            terms.width,
            terms.picp,
        ),
    )


def objective(
    kind: LossKind,
    lower: Operand,
    upper: Operand,
    ys: ArrayLike,
    config: LossConfig,
    target_range: float = 1.0,
) -> LossResult:
    """Dispatch to the training loss named by `kind`."""

    match kind:
        case LossKind.UBPI:
            return hybrid_loss(lower, upper, ys, config)
        case LossKind.LUBE:
            return lube_loss(lower, upper, ys, config, target_range)
        case LossKind.MBPEP:
            return mbpep_loss(lower, upper, ys, config)
        case LossKind.PINBALL:
            return quantile_loss(lower, upper, ys, config)
        case _:
            raise InternalError(f"no loss for kind {kind!r}")
