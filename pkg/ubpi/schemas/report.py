from pydantic import BaseModel, Field


class EvalReport(BaseModel):
    """Hard interval quality measures on one split (standardized scale)."""

    picp_hard: float = Field(ge=0.0, le=1.0)
    mpiw: float
    mse_midpoint: float
    crossing_rate: float = Field(ge=0.0, le=1.0)
    n: int = Field(ge=1)
    mpiw_raw: float | None = None
    """The width in original target units, when a standardizer is known."""

    mse_raw: float | None = None


class SweepRow(BaseModel):
    lambda_: float
    picp: float
    mpiw: float


class ComparisonRow(BaseModel):
    method: str
    picp: float
    mpiw: float
    best: bool = False
