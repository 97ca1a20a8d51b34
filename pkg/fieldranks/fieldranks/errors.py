# Copyright (c) 2024 Contributors
# All rights reserved.

"""Error hierarchy shared by the library and the command line.

Every error carries the process exit code the CLI maps it to.
Caller mistakes (bad modes, mismatched fields) stay plain ValueError.
"""


class FieldRanksError(Exception):
    exit_code = 1


class TensorFormatError(FieldRanksError):
    """A tensor or basis document could not be decoded."""
    exit_code = 1


class GuardExceeded(FieldRanksError):
    """An enumeration guard or point budget would be exceeded."""
    exit_code = 2

    def __init__(self, what: str, needed: int, allowed: int):
        super().__init__(f"{what}: needs {needed}, guard allows {allowed}")
        self.what = what
        self.needed = needed
        self.allowed = allowed


class VerificationFailed(FieldRanksError):
    """A certificate or an exact identity failed its re-check."""
    exit_code = 3


class InconclusiveEstimate(FieldRanksError):
    """The tower ratio did not settle near an integer."""
    exit_code = 3

    def __init__(self, message: str, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class InequalityViolation(FieldRanksError):
    """An audited inequality failed; `dump` holds the counterexample."""
    exit_code = 4

    def __init__(self, message: str, dump: dict | None = None):
        super().__init__(message)
        self.dump = dump or {}


def check_budget(what: str, needed: int, allowed: int) -> None:
    if needed > allowed:
        raise GuardExceeded(what, needed, allowed)
