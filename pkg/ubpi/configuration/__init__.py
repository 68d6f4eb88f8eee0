from platformdirs import user_data_dir

from ubpi.errors import ConfigurationError

import os
import dotenv


class Configuration:
    """
    The runtime configuration of the command line application. This class
    stores where results are written and how many worker processes the
    ensemble and sweep runners may use.
    """

    __output_directory: str
    __workers: int

    def __init__(
        self,
        output_directory: str | None = None,
        workers: int | None = None,
    ) -> None:
        """Initialize the runtime configuration.

        In normal use the parameters are left as `None` so the environment
        decides. The parameters are for testing purposes.

        :param output_directory: The directory results are written into. If \
            `None`, `UBPI_OUTPUT_DIR` is read from the environment (a `.env` \
            file is honoured). If not set either, a directory `ubpi` in the \
            user data directory is used. The directory is created if missing \
            and must be writable.
        :param workers: The number of worker processes used for ensemble \
            members and sweep cells. If `None`, `UBPI_WORKERS` is read from \
            the environment, defaulting to 1 (run inline).

        Raises:
            ConfigurationError: if the output directory cannot be created or \
                written, or `UBPI_WORKERS` is not a positive integer.
        """

        dotenv.load_dotenv()

        if output_directory:
            self.__output_directory = output_directory
        else:
            path_from_env = os.getenv("UBPI_OUTPUT_DIR")

            if path_from_env:
                self.__output_directory = path_from_env
            else:
                self.__output_directory = user_data_dir("ubpi", "ubpi")

        if workers is None:
            workers_from_env = os.getenv("UBPI_WORKERS", "1")

            try:
                workers = int(workers_from_env)
            except ValueError:
                raise ConfigurationError(
                    f"UBPI_WORKERS must be an integer, got "
                    f"{workers_from_env!r}"
                )

        if workers < 1:
            raise ConfigurationError("the worker count must be at least 1")

        self.__workers = workers

        ensure_writable_directory(self.__output_directory)

    @property
    def output_directory(self) -> str:
        """Get the directory results are written into."""

        return self.__output_directory

    @property
    def workers(self) -> int:
        """Get the number of worker processes."""

        return self.__workers

    def resolve_output(self, out: str | None, *parts: str) -> str:
        """Resolve (and create) the directory a command writes into.

        :param out: The `--out` flag; overrides the configured output \
            directory when given.
        :param parts: Sub-directories appended to the base directory.

        Returns:
            The absolute path of an existing writable directory.
        """

        base = out if out else self.__output_directory
        path = os.path.abspath(os.path.join(base, *parts))

        ensure_writable_directory(path)

        return path


def ensure_writable_directory(path: str) -> None:
    """Create `path` if needed and check that it is a writable directory."""

    if not os.path.exists(path):
        try:
            os.makedirs(path, exist_ok=True)
        except OSError as e:
            raise ConfigurationError(
                f"could not create output directory at {path}: {e}"
            )

    if not os.path.isdir(path):
        raise ConfigurationError(f"{path} is not a directory")

    # check if it's writable
    if not os.access(path, os.W_OK):
        raise ConfigurationError(f"{path} is not writable")
