"""Exception types raised by the planar-sector engine.

Every failure mode gets its own class so callers (and the CLI) can map
errors to exit codes without string matching.  Computational failures
derive from EngineError; malformed user input derives from InputError.
"""


class EngineError(Exception):
    """Base class for computational failures."""


class InputError(Exception):
    """Base class for malformed input (config files, CLI arguments)."""


class InvalidSpectrum(InputError):
    """Eigenvalues not strictly increasing/positive, or multiplicities < 1."""


class NonConvergence(EngineError):
    """Newton or continuation failed to reach the requested coupling.

    Carries the last coupling value that did converge, if any, in
    ``last_converged``.
    """

    def __init__(self, message, last_converged=None):
        super().__init__(message)
        self.last_converged = last_converged


class PoleHit(EngineError):
    """Evaluation point coincides with a pole of the rational curve."""


class PoleProximity(EngineError):
    """Evaluation point too close to a pole of an amplitude; the caller
    should move the point rather than trust a regularized value."""


class RootDefect(EngineError):
    """Polynomial roots failed their backward-error check."""


class SingularSystem(EngineError):
    """Linear system for the cylinder boundary values is ill-conditioned."""


class DegenerateResultant(EngineError):
    """Resultant of the two curve polynomials vanished identically."""


class QuadratureNonConvergence(EngineError):
    """Contour quadrature did not reach the requested accuracy."""


class BranchCrossing(EngineError):
    """Integrand crossed a branch cut of the principal logarithm."""


class DomainError(EngineError):
    """Closed-form expression evaluated outside its real domain."""


class PadeDegenerate(EngineError):
    """Continued-fraction truncation produced a degenerate rational."""


class WNonConvergence(EngineError):
    """Halley iteration for the Lambert function failed to converge."""


class ParseError(InputError):
    """Configuration file could not be parsed."""


class ValidationError(InputError):
    """Configuration parsed but failed schema validation."""
