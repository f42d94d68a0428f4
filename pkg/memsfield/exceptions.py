"""Exception hierarchy for memsfield

Invalid inputs raise subclasses of :class:`ValueError`; failures of a
numerical procedure raise subclasses of :class:`NumericalError`, which
is a :class:`RuntimeError`.  The command-line interface maps the two
groups onto exit codes 1 and 2.
"""


class MemsFieldError(Exception):
    """Base class for all memsfield errors"""


class ParameterError(MemsFieldError, ValueError):
    """Problem or family parameters outside their admissible range"""


class DomainError(MemsFieldError, ValueError):
    """Transform argument outside the range of the active branch"""


class PreconditionViolated(MemsFieldError, ValueError):
    """Operation called outside the range where its construction applies"""


class InitialDataOutsideOmega(MemsFieldError, ValueError):
    """Phase-plane initial data does not lie in the region E < 0"""


class NumericalError(MemsFieldError, RuntimeError):
    """Base class for failures of a numerical procedure"""


class NoZeroFound(NumericalError):
    """No zero where one was expected (shooting horizon, Bessel bracket scan)"""


class SingularityHit(NumericalError):
    """Solution approached the singular value 1 during integration"""


class FoldNotInterior(NumericalError):
    """Maximum of the sampled curve sits at the boundary of the grid"""


class Infeasible(NumericalError):
    """Feasibility function of the Picard scheme never drops below 1"""


class NonConvergence(NumericalError):
    """Fixed-point iteration did not converge within the iteration limit"""


class IntegrationFailed(NumericalError):
    """ODE integrator stopped before the end of the requested interval"""


class EvaluationMismatch(NumericalError):
    """Two independent evaluations of the same quantity disagree"""


class LambdaTooLarge(NumericalError):
    """Requested voltage exceeds what the rescaling family can reach"""


class Blowup(NumericalError):
    """Inward integration stopped before reaching the requested radius

    Parameters
    ----------
    message : str
    last_radius : float
        Smallest radius reached by the integrator
    """

    def __init__(self, message, last_radius):
        super().__init__(message)
        self.last_radius = last_radius
