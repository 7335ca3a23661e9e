"""Exception hierarchy shared by all k3lg modules."""


class K3LGError(Exception):
    """Base class; the CLI maps subclasses to exit codes."""


class InvalidInput(K3LGError, ValueError):
    pass


class ParseError(InvalidInput):
    pass


class InvariantViolation(InvalidInput):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class DegenerateForm(InvalidInput):
    pass


class DimensionMismatch(InvalidInput):
    pass


class FactorizationError(K3LGError):
    """Raised when an integer cannot be factored within the trial-division bound."""


class NotRepresentable(K3LGError):
    """A local obstruction rules out the requested representation."""

    def __init__(self, message, place=None, invariants=None):
        super().__init__(message)
        self.place = place
        self.invariants = invariants or {}


class SearchExhausted(K3LGError):
    """Locally representable, but no witness was found within the height bound."""

    def __init__(self, message, height_bound=None, entry=None):
        super().__init__(message)
        self.height_bound = height_bound
        self.entry = entry


class RankDeficient(InvalidInput):
    pass


class SignatureError(InvalidInput):
    pass


class DegenerateSplit(K3LGError):
    pass


class OutOfRange(K3LGError):
    pass


class MissingPlace(K3LGError):
    pass


class BudgetExceeded(K3LGError):
    pass
