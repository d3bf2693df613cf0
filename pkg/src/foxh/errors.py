"""Exception hierarchy shared across the package.

Errors split into three families so the CLI can map them onto exit codes:
user/config mistakes, violated mathematical hypotheses, and numerical
failures that occur even though the request was admissible.
"""


class FoxHError(Exception):
    """Base class for all package errors."""


class ParameterError(FoxHError):
    """Structurally invalid kernel parameters (orders, weights, lengths)."""


class OutOfTheoryError(FoxHError):
    """Parameter signs fall outside the nine classified cases."""


class HypothesisError(FoxHError):
    """A theorem hypothesis or admissibility condition fails.

    Carries the name of the violated condition so callers can report it.
    """

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        self.detail = detail
        msg = condition if not detail else f"{condition}: {detail}"
        super().__init__(msg)


class NoAdmissibleContourError(HypothesisError):
    """No vertical Mellin-Barnes contour yields a convergent integral."""


class PoleError(FoxHError):
    """Evaluation requested at or numerically indistinguishable from a pole."""


class PoleOnLineError(FoxHError):
    """A pole of the symbol sits on the probe line Re s = 1 - nu."""


class DivergentIntegralError(FoxHError):
    """Quadrature detected a non-integrable or non-decaying integrand."""


class NumericalError(FoxHError):
    """Internal numerical failure (budget exceeded, no convergence)."""
