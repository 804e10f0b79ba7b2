"""Exception taxonomy shared by all dspec modules."""


class DspecError(Exception):
    """Base class for all dspec errors."""


class PoleEvaluation(DspecError):
    """A Herglotz-Nevanlinna function was evaluated at (or too close to) a pole."""


class DomainViolation(DspecError):
    """Arguments fall outside the admissible set of a transformation."""


class OutOfDomain(DspecError):
    """Evaluation point outside (0, pi)."""


class NumericalFailure(DspecError):
    """Integrator breakdown or disagreement between redundant numerical routes."""


class BracketFailure(NumericalFailure):
    """An eigenvalue bracket did not contain a sign change of chi."""


class MissedRoot(NumericalFailure):
    """Sign-change count disagrees with the n-indexing of the spectrum."""


class NotAnEigenvalue(DspecError):
    """beta extraction found inconsistent psi/phi ratios; lambda is not an eigenvalue."""


class NonPositiveGamma(DspecError):
    """A norming constant came out non-positive, signalling an upstream error."""


class AmbiguousZero(DspecError):
    """A grazing (double) zero was detected where only simple zeros can occur."""


class Unsupported(DspecError):
    """The requested computation is not defined for this input class."""


class InsufficientData(DspecError):
    """Not enough spectral data for the requested fit."""
