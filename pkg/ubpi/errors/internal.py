from ubpi.errors import UbpiError


class InternalError(UbpiError):
    """
    An error occurred which is likely due to a bug in the package logic.
    """

    exit_code = 1
