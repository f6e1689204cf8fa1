"""Exception types shared across the solver."""


class SolverError(Exception):
    """Base class for all solver failures."""


class NonPhysicalState(SolverError):
    """A state violates positivity (density floor, covolume, energy)."""


class DegenerateDeformation(SolverError):
    """Inverse deformation gradient is not orientation preserving (det <= 0)."""


class HyperbolicityLoss(SolverError):
    """Squared sound speed (or a wave-speed argument) is not positive."""


class DegenerateFan(SolverError):
    """Riemann fan denominator collapsed; callers fall back to central flux."""


class NoConvergence(SolverError):
    """Iterative solve did not reach the requested tolerance."""

    def __init__(self, iterations, residual, message=""):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            message or f"no convergence after {iterations} iterations "
                       f"(residual {residual:.3e})")


class VacuumFormation(SolverError):
    """Star-region density collapsed below the floor."""


class OrphanFlip(SolverError):
    """A cell changed material without an adjacent multimaterial face.

    Signals a CFL violation: the interface crossed more than one face in a
    single step.
    """


class ParseError(SolverError):
    """Malformed case configuration."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        loc = ""
        if line is not None:
            loc = f" (line {line})"
        if field is not None:
            loc += f" [field {field!r}]"
        super().__init__(message + loc)
