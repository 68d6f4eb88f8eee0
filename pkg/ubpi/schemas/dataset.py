from pydantic import BaseModel, ConfigDict, Field


class DatasetProfile(BaseModel):
    """Describes how to ingest one user-supplied benchmark CSV."""

    model_config = ConfigDict(frozen=True)

    name: str
    csv: str
    """Path of the CSV file; relative paths resolve against the profile."""

    target: str | int
    """The target column, by header name or zero-based index."""

    large: bool = False
    """Large datasets use a hidden layer of 100 units instead of 50."""

    drop: tuple[str | int, ...] = Field(default_factory=tuple)

    @property
    def hidden(self) -> int:
        return 100 if self.large else 50
