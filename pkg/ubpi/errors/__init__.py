class UbpiError(Exception):
    """Base class of every error raised by the package.

    `exit_code` is what the command line exits with when the error reaches
    the command boundary.
    """

    exit_code: int = 1

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message


class InvalidArgumentError(UbpiError):
    exit_code = 2


class NotFoundError(UbpiError):
    exit_code = 1


class SnapshotError(UbpiError):
    exit_code = 1


class DatasetError(UbpiError):
    """A dataset could not be ingested.

    `row` and `column` point at the offending cell when there is one; rows
    are 1-based file lines, columns are header names or 0-based indices.
    """

    exit_code = 1

    def __init__(
        self,
        message: str,
        row: int | None = None,
        column: str | int | None = None,
    ) -> None:
        if row is not None and column is not None:
            message = f"{message} (row {row}, column {column!r})"
        elif row is not None:
            message = f"{message} (row {row})"
        elif column is not None:
            message = f"{message} (column {column!r})"

        super().__init__(message)
        self.row = row
        self.column = column


class ConfigurationError(UbpiError, RuntimeError):
    """The runtime environment (output directory, workers) is unusable."""

    exit_code = 1
