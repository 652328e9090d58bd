"""Exception types shared across the package.

Every error carries a short machine-readable ``code``. The CLI maps
:class:`ValidationError` to exit status 2 and :class:`InvariantViolation`
to exit status 3.
"""


class PinwError(Exception):
    code = "error"

    def __init__(self, message="", code=None):
        if code is not None:
            self.code = code
        super().__init__(f"{self.code}: {message}" if message else self.code)


class ValidationError(PinwError, ValueError):
    """Bad input: degenerate triangles, malformed files, out-of-range parameters."""

    code = "invalid"


class DegenerateError(ValidationError):
    code = "degenerate"


class InvariantViolation(PinwError, RuntimeError):
    """An internal guarantee did not hold (for instance a delta property)."""

    code = "invariant"
