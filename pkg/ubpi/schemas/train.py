from enum import unique

from ubpi._compat import StrEnum
from pydantic import BaseModel, ConfigDict, Field

from ubpi.schemas.loss import LossConfig, LossKind


@unique
class OptimizerKind(StrEnum):
    SGD = "sgd"
    ADAM = "adam"


class TrainConfig(BaseModel):
    """Every knob of one training run; echoed into every report."""

    model_config = ConfigDict(frozen=True)

    loss_kind: LossKind = LossKind.UBPI
    loss: LossConfig = LossConfig()
    batch_size: int = Field(2, ge=1)
    """Mini-batch size n. The uncertainty term grows with n while the
    coverage penalty does not, so lambda is calibrated for this size."""

    epochs: int = Field(100, ge=1)
    learning_rate: float = Field(1e-3, gt=0.0)
    optimizer: OptimizerKind = OptimizerKind.ADAM
    seed: int = Field(0, ge=0)
    clip_norm: float = Field(1e4, gt=0.0)
    """Global gradient-norm ceiling; ordinary coverage-penalty spikes stay
    below it."""

    hidden: int = Field(50, ge=1)
    bias_offset: float = Field(1.0, ge=0.0)
    """The output-bias offset: lower head starts at -offset, upper at +."""


class EpochRecord(BaseModel):
    """Per-epoch training diagnostics.

    The loss terms are averaged over the epoch's mini-batches; the hard
    coverage, width and crossing rate are measured on the whole training
    split after the epoch.
    """

    epoch: int
    total: float
    l_ue: float
    l_pi: float
    mse: float
    mpiw_soft_batch: float
    picp_soft: float
    picp_hard: float
    mpiw: float
    crossing_rate: float


class TrainTrace(BaseModel):
    initial_crossing_rate: float
    records: list[EpochRecord] = []

    def columns(self) -> list[str]:
        return list(EpochRecord.model_fields)
