from ubpi.errors import UbpiError


class DomainError(UbpiError):
    """An operation was evaluated outside of its mathematical domain."""

    exit_code = 1


class DivergenceError(UbpiError):
    """Training produced a non-finite loss or parameter."""

    exit_code = 1

    def __init__(
        self,
        epoch: int,
        step: int,
        member: int | None = None,
        detail: str = "non-finite loss",
    ) -> None:
        where = f"epoch {epoch}, step {step}"

        if member is not None:
            where = f"member {member}, {where}"

        super().__init__(f"training diverged at {where}: {detail}")
        self.epoch = epoch
        self.step = step
        self.member = member
        self.detail = detail

    def __reduce__(self) -> tuple[object, ...]:
        # crosses process boundaries from ensemble workers
        return (
            DivergenceError,
            (self.epoch, self.step, self.member, self.detail),
        )
