"""Exception types shared across the package."""


class ProlongationError(Exception):
    pass


class ConfigurationError(ProlongationError, ValueError):
    """Unsupported series, rank, bundle or case description."""


class ResourceError(ProlongationError, RuntimeError):
    """A configured size cap would be exceeded."""

    def __init__(self, message, cap=None):
        super().__init__(message)
        self.cap = cap


class VerificationError(ProlongationError, AssertionError):
    """An exact identity that must hold did not."""
