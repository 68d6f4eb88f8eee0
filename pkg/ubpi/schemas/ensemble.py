from enum import unique

from ubpi._compat import StrEnum
from pydantic import BaseModel

from ubpi.schemas.train import TrainConfig


@unique
class Widening(StrEnum):
    """What is added around the mean member interval."""

    VARIANCE = "variance"
    STD = "std"


class EnsembleManifest(BaseModel):
    format_version: int = 1
    m: int
    seeds: list[int]
    config_hash: str
    config: TrainConfig
    widening: Widening = Widening.VARIANCE
    split_seed: int | None = None
    train_fraction: float = 0.9
    members: list[str]
