"""Exception types shared across the package."""


class Me2PhError(Exception):
    """Base class for all errors raised by this package."""


class InvalidRepresentationError(Me2PhError):
    """A vector/matrix pair or structured representation violates its invariants."""


class DecViolationError(Me2PhError):
    """The dominant eigenvalue condition does not hold.

    Carries a human-readable diagnostic naming the tying eigenvalues.
    """

    def __init__(self, diagnostic: str):
        super().__init__(diagnostic)
        self.diagnostic = diagnostic


class PositiveDensityError(Me2PhError):
    """The density is not strictly positive where the construction needs it."""

    def __init__(self, diagnostic: str):
        super().__init__(diagnostic)
        self.diagnostic = diagnostic


class NumericError(Me2PhError):
    """A numerical step failed (ill conditioning, overflow, size limits).

    ``detail`` holds whatever diagnostic quantity was available, for example a
    condition-number estimate or an offending index/value pair.
    """

    def __init__(self, message: str, detail=None):
        super().__init__(message)
        self.detail = detail
