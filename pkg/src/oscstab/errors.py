"""Exception types shared across the package."""


class OscstabError(Exception):
    """Base class for all package-specific errors."""


class EvaluationError(OscstabError):
    """A scalar function or vector field was evaluated outside its domain.

    Carries the offending value so callers can report where evaluation broke.
    """

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class DimensionMismatch(OscstabError):
    """Operands of a geometric operation do not share a dimension."""


class SingularityError(OscstabError):
    """A feedback matrix is numerically singular at some state.

    `where` holds the state at which the solve was refused.
    """

    def __init__(self, message, where=None, cond=None):
        super().__init__(message)
        self.where = where
        self.cond = cond


class KappaStructureError(OscstabError):
    """A frequency-multiplier assignment violates its structural identities."""


class KappaSearchError(OscstabError):
    """No admissible frequency-multiplier assignment exists below the bound."""


class ConfigError(OscstabError):
    """A run configuration is malformed or inconsistent with its scenario."""
