from ubpi.configuration import Configuration


_configuration: None | Configuration = None


def get_configuration() -> Configuration:
    """Use this to get the process-wide `Configuration` object"""

    global _configuration

    if _configuration is None:
        _configuration = Configuration()

    return _configuration


def override_configuration(configuration: Configuration | None) -> None:
    """Replace the cached configuration; pass `None` to drop the override."""

    global _configuration

    _configuration = configuration
