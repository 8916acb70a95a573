"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: resource caps exit 3,
input problems exit 4 (assertion failures inside experiment reports
exit 2 without raising).
"""


class VerbaError(Exception):
    """Base class for all package errors."""


class InputError(VerbaError):
    """Malformed user input: bad group spec, bad word text, bad parameters."""


class CapExceededError(VerbaError):
    """A desk-scale resource cap was exceeded.

    Carries ``partial_count`` when an enumeration was abandoned midway.
    """

    def __init__(self, message: str, partial_count: int | None = None):
        super().__init__(message)
        self.partial_count = partial_count


class InfeasibleWordError(CapExceededError):
    """Value-set enumeration has no feasible plan for this word on this group."""


class WordSyntaxError(InputError):
    """Word text does not conform to the grammar; carries the failing position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class InvarianceCertificationError(VerbaError):
    """The translation-invariance hypothesis of the counting bound failed."""


class HorizonError(VerbaError):
    """The simple-group table cannot certify completeness for the requested exponent."""
