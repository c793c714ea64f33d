"""Exception hierarchy for qhj.

Every numerical failure derives from :class:`NumericalError` so the CLI can
map it to its exit code without enumerating subclasses.
"""


class QHJError(Exception):
    """Base class for all package errors."""


class ConfigError(QHJError, ValueError):
    """Invalid user input or inconsistent options."""


class NumericalError(QHJError, ArithmeticError):
    """A computation could not reach its requested accuracy."""


class DomainError(QHJError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class BranchCutAmbiguity(DomainError):
    """Argument lies on a branch cut; the caller must perturb it."""


class OutOfRange(DomainError):
    """Query point outside the sampled hull."""


class DirectionMismatch(ConfigError):
    """A field with the wrong integration direction was supplied."""


class NoTurningPoint(QHJError):
    """The energy shell has no classical turning point in the window."""


class SeedRegionTooNarrow(ConfigError):
    """No classical region wide enough to place the Riccati seed."""


class QuadratureFailure(NumericalError):
    """Adaptive quadrature exceeded its maximum refinement depth."""


class RootNotConverged(NumericalError):
    """Bracketed root finding did not converge."""


class StiffnessFailure(NumericalError):
    """ODE step size underflow or step budget exhausted."""


class DegenerateMatch(NumericalError):
    """Boundary match is singular (vanishing real part at the turning point)."""


class NoRootInGrid(NumericalError):
    """No quantization crossing inside the scanned energy grid."""


class EnergyDerivativeFailure(NumericalError):
    """Finite-difference energy derivative is not finite."""


class FitFailure(NumericalError):
    """Amplitude fit residual above threshold."""


class ShootingNotConverged(NumericalError):
    """Eigenvalue shooting failed to bracket or refine a root."""
