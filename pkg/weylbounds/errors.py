"""Exceptions raised by the library; the CLI maps them to exit codes."""

from typing import Optional


class WeylBoundsError(Exception):
    exit_code = 1


class InvalidParameterError(WeylBoundsError, ValueError):
    """A precondition on the inputs does not hold."""

    exit_code = 2


class ResourceCapError(WeylBoundsError):
    """A grid, enumeration or sweep would exceed its configured cap."""

    exit_code = 3

    def __init__(self, what: str, estimate: int, cap: int, hint: Optional[str] = None):
        self.what = what
        self.estimate = estimate
        self.cap = cap
        message = f"{what}: {estimate:,} exceeds the cap of {cap:,}"
        if hint:
            message += f" ({hint})"
        super().__init__(message)
