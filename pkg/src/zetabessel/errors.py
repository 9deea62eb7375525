"""Exception hierarchy shared across the package."""


class ZetaBesselError(Exception):
    """Base class for all package errors."""


class PoleError(ZetaBesselError, ValueError):
    """Function evaluated at a pole."""


class ConvergenceError(ZetaBesselError, ArithmeticError):
    """A series or iteration exhausted its budget before meeting its target."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NearIntegerOrderError(ZetaBesselError, ValueError):
    """Bessel order too close to an integer and the limit path is disabled."""


class GcdError(ZetaBesselError, ValueError):
    """A coprimality precondition was violated."""


class SizeError(ZetaBesselError, ValueError):
    """Input exceeds a runtime guard."""


class PoleProximityError(ZetaBesselError, ValueError):
    """A grid point of a singular tail coincides with the evaluation point."""


class QuadratureError(ZetaBesselError, ArithmeticError):
    """Adaptive quadrature hit its subdivision limit."""


class HypothesisError(ZetaBesselError, ValueError):
    """Parameters violate a hypothesis of the identity being verified."""
