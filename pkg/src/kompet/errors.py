"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: InputError -> 2, ApiError -> 3.
"""


class KompetError(Exception):
    """Base class for all toolkit errors."""


class InputError(KompetError):
    """Malformed or inconsistent input data (files, labels, arguments)."""


class ApiError(KompetError):
    """A remote call failed.

    `status` carries the HTTP status code when one was received;
    `retryable` marks transient failures (5xx, timeouts).
    """

    def __init__(self, message: str, status: int | None = None, retryable: bool = False):
        super().__init__(message)
        self.status = status
        self.retryable = retryable
