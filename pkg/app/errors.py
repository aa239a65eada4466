"""Exception hierarchy shared by the library and the command line.

Every error carries the process exit code the CLI uses when it escapes a
command: 2 for bad input, 3 for dynamical failures (ties, caps), 4 for a
violated invariant.
"""


class IetError(Exception):
    exit_code = 1


# ---------------------------------------------------------------------------
# Input errors (exit 2)
# ---------------------------------------------------------------------------


class InputError(IetError, ValueError):
    exit_code = 2


class ParseError(InputError):
    pass


class InvalidBasis(InputError):
    pass


class BasisMismatch(InputError):
    pass


class InvalidPermutation(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NonPositiveLength(InputError):
    pass


class OutOfRange(InputError):
    pass


class NotInPStar(InputError):
    """The last entry of the permutation is +-n; no Rauzy step is defined."""


class EmptyInput(InputError):
    pass


class WordInapplicable(InputError):
    pass


class InvalidCounts(InputError):
    """No construction exists for the requested (n, k, l) profile."""


class PreconditionViolation(InputError):
    pass


# ---------------------------------------------------------------------------
# Dynamical errors (exit 3)
# ---------------------------------------------------------------------------


class DynamicalError(IetError):
    exit_code = 3


class TieEncountered(DynamicalError):
    pass


class CapExceeded(DynamicalError):
    pass


class DegenerateBlock(DynamicalError):
    """An oriented block failed the depth-checked Keane condition."""


class OrbitHalted(DynamicalError):
    def __init__(self, message: str, point=None, step: int = 0) -> None:
        super().__init__(message)
        self.point = point
        self.step = step


# ---------------------------------------------------------------------------
# Invariant violations (exit 4)
# ---------------------------------------------------------------------------


class InvariantViolation(IetError):
    exit_code = 4


class BoundViolation(InvariantViolation):
    pass


class TargetMismatch(InvariantViolation):
    pass


class HarnessFailure(InvariantViolation):
    pass
