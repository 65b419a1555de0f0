"""Exception hierarchy.

Everything raised on purpose derives from :class:`FracsysError`, so callers
can separate constraint violations (bad parameters, no admissible root) from
numerical failures (an iteration that did not converge).
"""


class FracsysError(Exception):
    """Base class for all package errors."""


class ConstraintError(FracsysError, ValueError):
    """Inputs violate a mathematical constraint of the problem."""


class ParameterError(ConstraintError):
    """A parameter tuple is outside its admissible range."""


class DomainError(ConstraintError):
    """A function was evaluated outside its domain."""


class NoRoot(ConstraintError):
    """No admissible root of the coupling function exists for these parameters."""


class PositivityViolation(ConstraintError):
    """A root exists but the amplitude relation cannot be satisfied with k > 0."""


class OutOfRange(ConstraintError):
    """A target value lies outside the range attained by a monotone map."""


class SemitrivialMinimizer(ConstraintError):
    """The minimum of the landscape is attained at tau = 0."""


class ZeroCoupling(ConstraintError):
    """The linearization was requested at beta = 0, where it decouples."""


class HypothesisError(ConstraintError):
    """The hypotheses of the least-energy uniqueness result do not hold."""


class NumericalError(FracsysError, ArithmeticError):
    """A numerical procedure failed."""


class NonConvergence(NumericalError):
    """An iteration hit its cap before meeting its tolerance."""


class CollapseToZero(NumericalError):
    """A fixed-point iteration collapsed onto the zero function."""


class Unclassified(NumericalError):
    """Critical-point counting and the sign table of f' disagree."""


class WeightFloorTooSmall(NumericalError):
    """The weight floor leaves the weighted eigenproblem too ill-conditioned."""


class ConfigError(FracsysError):
    """A run configuration could not be parsed or validated."""
