"""Exception hierarchy shared by all fractel modules."""


class FractelError(Exception):
    """Base class for every error raised by this package."""


class DegenerateIntervalError(FractelError, ValueError):
    pass


class DomainEscapeError(FractelError):
    """A map sent a point outside the domain it is required to stay in."""


class NonFiniteError(FractelError, ArithmeticError):
    pass


class MapMismatchError(FractelError):
    """Two fractels that must share the same l do not."""


class ZeroScalarError(FractelError, ValueError):
    pass


class ZeroWitnessError(FractelError):
    """A witness function vanishes (to 1e-14) where a division needs it."""


class VerificationError(FractelError):
    """A fractel failed verification against its claimed witness."""


class NotContractiveError(FractelError):
    pass


class NotCoveringError(FractelError):
    pass


class ContractionViolationError(FractelError, ValueError):
    pass


class SingularMatrixError(FractelError, ArithmeticError):
    pass


class SingularTError(SingularMatrixError):
    pass


class NotInvariantError(FractelError):
    """The span of a basis is not mapped into itself by the pullback of l."""


class NotInSError(FractelError, ValueError):
    """The affine map does not leave [0, 1] invariant."""


class EigOneError(SingularMatrixError):
    """I - M is singular because M has eigenvalue 1."""


class BadDigitError(FractelError, ValueError):
    pass


class BadRationalError(FractelError, ValueError):
    pass


class ParseError(FractelError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class UnknownFixtureError(FractelError, KeyError):
    pass
