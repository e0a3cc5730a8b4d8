"""Exception types shared across the package."""


class StablePGFError(Exception):
    """Base class for all errors raised by stablepgf."""


class InvalidPGFError(StablePGFError, ValueError):
    """Input is not a valid probability generating function."""


class StructuralError(StablePGFError, ValueError):
    """Input violates a structural requirement (shape, degree, hypotheses)."""


class DegenerateLawError(StablePGFError, ValueError):
    """The law has zero variance, so normalized quantities are undefined."""


class HypothesisError(StablePGFError, ValueError):
    """A theorem was invoked on an input that does not satisfy its hypothesis."""


class ConclusionFailure(StablePGFError, AssertionError):
    """An input satisfying a theorem's hypothesis produced a failing conclusion.

    This is never expected; it indicates either a bug or a counterexample and
    is deliberately not a subclass of ``ValueError`` so that callers catching
    input errors do not swallow it.
    """


class RootFindingError(StablePGFError, ArithmeticError):
    """The root finder could not certify the roots within its budget."""
