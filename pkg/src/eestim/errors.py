"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: invalid input -> 2, divergence or MLE
nonexistence -> 3, failed convergence gate -> 4.
"""


class EstimError(Exception):
    """Base class for package-specific errors."""


class InvalidInputError(EstimError, ValueError):
    """Malformed or inconsistent caller input (dims, encoding, config, files)."""


class ConfigError(InvalidInputError):
    """Invalid estimator or experiment configuration."""


class ParseError(InvalidInputError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


class EnumerationSizeError(InvalidInputError):
    """System too large for exact enumeration."""


class DivergenceError(EstimError):
    """A parameter ran past the configured guard during estimation."""

    def __init__(self, message: str, parameter: int | None = None):
        super().__init__(message)
        self.parameter = parameter


class NonexistenceError(DivergenceError):
    """The MLE does not exist (target statistics on the convex-hull boundary)."""


class ConvergenceFailure(EstimError):
    """A convergence test failed where a passing test was required."""
