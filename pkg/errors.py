"""
Errors Module
Exception hierarchy shared by the series, surface, flow and verification modules.
"""


class CRFlowError(Exception):
    """Base class for every error raised by the library."""


class NonFiniteError(CRFlowError, ValueError):
    """A NaN or infinite value reached a numeric entry point."""

    def __init__(self, what="argument"):
        """
        Args:
            what: Name of the offending value
        """
        super().__init__(f"non-finite {what}")


class DomainError(CRFlowError, ValueError):
    """A point lies outside the declared domain of a model."""


class GuardError(CRFlowError, ArithmeticError):
    """A cosine or positivity guard failed."""


class BranchError(CRFlowError, ArithmeticError):
    """The principal-logarithm argument left the right half-plane."""

    def __init__(self, message="log branch", t=None):
        super().__init__(message)
        self.t = t


class SingularDerivativeError(CRFlowError, ZeroDivisionError):
    """A Wirtinger derivative was requested at z2 = 0, where |z2| is not smooth."""

    def __init__(self):
        super().__init__("derivative singular at origin")


class SurfaceSolveError(CRFlowError, RuntimeError):
    """Solving rho = 0 for Re z1 did not reach point_tol."""

    def __init__(self, detail=""):
        message = "surface solve failed"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class ParameterMismatchError(CRFlowError, ValueError):
    """A vector field and a model were built from different (a, alpha)."""

    def __init__(self, detail=""):
        message = "parameter mismatch"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class IdentityUndefinedError(CRFlowError, ValueError):
    """Identity iii divides by alpha and has no alpha = 0 form."""

    def __init__(self):
        super().__init__("identity iii undefined for alpha=0")


class DegenerateProbeError(CRFlowError, ValueError):
    """The dilation probe was asked for the trivial factor 1."""

    def __init__(self):
        super().__init__("degenerate probe")


class UnobservableParameterError(CRFlowError, ValueError):
    """No sample carries information about the flow parameter."""

    def __init__(self):
        super().__init__("parameter unobservable")


class ConfigError(CRFlowError):
    """Unreadable or invalid configuration file."""
