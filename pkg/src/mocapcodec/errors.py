"""Exception types shared across the package."""


class MocapCodecError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(MocapCodecError):
    """A sequence file could not be parsed.

    Carries the 1-based line number where parsing failed, when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class StreamError(MocapCodecError):
    """A compressed stream is malformed, truncated, or fails its checksum."""


class ConvergenceError(MocapCodecError):
    """Annealing did not converge within the iteration budget.

    The last computed state is attached as ``result`` so callers can
    inspect or keep it.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
