"""Exception types shared across the package."""


class OmmlabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(OmmlabError, ValueError):
    """An argument is outside the physical or mathematical domain of an operation."""


class ConfigError(OmmlabError, ValueError):
    """A configuration mapping is malformed: unknown keys, bad types, bad ranges."""


class NumericalError(OmmlabError, ArithmeticError):
    """A numerical routine produced an unusable result (singular system,
    non-converged eigensolve, negative radicand beyond tolerance, ...)."""


class ConvergenceError(NumericalError):
    """An iterative routine ran out of its integration horizon or iteration budget."""


class StabilityError(OmmlabError):
    """A routine that requires an asymptotically stable drift was handed an
    unstable one."""


class DegenerateOperatingPointError(OmmlabError):
    """The semiclassical working point is degenerate (vanishing response
    denominator), so linearization is meaningless there."""
