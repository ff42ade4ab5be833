"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-contract input (bad shapes, parameters, files)."""


class NotPsdError(InputError):
    """Matrix is not positive semidefinite within tolerance."""


class ParseError(InputError):
    """Matrix file could not be parsed; carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GuardError(RuntimeError):
    """A safety guard refused the computation (e.g. enumeration too large)."""

    def __init__(self, message: str, count: int | None = None):
        self.count = count
        super().__init__(message)


class NumericalError(RuntimeError):
    """A numerical routine failed in a way that cannot be certified around."""
