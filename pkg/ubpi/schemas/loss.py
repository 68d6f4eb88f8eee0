from enum import unique

from ubpi._compat import StrEnum
from pydantic import BaseModel, ConfigDict, Field, model_validator


@unique
class LossKind(StrEnum):
    UBPI = "ubpi"
    LUBE = "lube"
    MBPEP = "mbpep"
    PINBALL = "pinball"


class LossConfig(BaseModel):
    """The hyper-parameters shared by every interval loss."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    confidence_level: float = Field(0.95, gt=0.0, lt=1.0, alias="pc")
    """The predefined confidence level P_c."""

    lambda_: float = Field(15.0, ge=0.0, alias="lambda")
    """Weight of the coverage penalty against the width/regression term."""

    soften: float = Field(160.0, gt=0.0)
    """Sharpness s of the sigmoid-relaxed coverage indicator."""

    mpiw_floor: float = Field(1e-6, gt=0.0)
    """Lower clamp of the width inside the uncertainty term only."""

    @property
    def quantiles(self) -> tuple[float, float]:
        """The (lower, upper) quantile pair matching the confidence level."""

        tail = (1.0 - self.confidence_level) / 2.0
        return tail, 1.0 - tail


class LossBreakdown(BaseModel):
    """The scalar terms of one loss evaluation.

    For the hybrid loss `total == l_ue + lambda * l_pi`; the other losses
    report `l_ue` and `l_pi` as diagnostics only.
    """

    model_config = ConfigDict(frozen=True)

    kind: LossKind = LossKind.UBPI
    lambda_: float = 0.0
    total: float
    l_ue: float
    l_pi: float
    mse: float
    mpiw: float
    picp_soft: float

    @model_validator(mode="after")
    def check_hybrid_identity(self) -> "LossBreakdown":
        if self.kind != LossKind.UBPI:
            return self

        expected = self.l_ue + self.lambda_ * self.l_pi
        tolerance = 1e-12 * max(1.0, abs(expected))

        if abs(self.total - expected) > tolerance:
            raise ValueError(
                f"total {self.total} differs from l_ue + lambda * l_pi "
                f"= {expected}"
            )

        return self
