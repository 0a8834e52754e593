"""Exception types shared across the package."""


class SimulationError(Exception):
    """Base class for all solver and transform failures."""


# --- transform engine ---

class NonFiniteInput(SimulationError):
    pass


class ContourOutsideStrip(SimulationError):
    """Weighted signal is not square-summable on the grid at the requested contour."""


class GridMismatch(SimulationError):
    pass


class NonFiniteMultiplier(SimulationError):
    pass


class PoleOnContour(SimulationError):
    """A trigonometric multiplier has a (near-)pole at a contour node."""


# --- norm machinery ---

class IllConditionedFit(SimulationError):
    pass


class DerivativeUnderresolved(SimulationError):
    pass


class BetaForbidden(SimulationError):
    pass


class AngularDerivativeUnderresolved(SimulationError):
    pass


class TimeGridTooCoarse(SimulationError):
    pass


# --- geometry ---

class OutOfDomain(SimulationError):
    pass


class FoldedMap(SimulationError):
    """Vertical shear map is not injective (1 + psi_y reached zero)."""


class DegenerateDroplet(SimulationError):
    pass


# --- elliptic solvers ---

class QuadratureUnderresolved(SimulationError):
    pass


class SingularSystem(SimulationError):
    pass


class NoContraction(SimulationError):
    """Fixed-point iteration for the perturbed-domain pressure stopped contracting."""


class StalePressure(SimulationError):
    pass


# --- time stepping ---

class StepRejected(SimulationError):
    pass


class StencilUnderresolved(SimulationError):
    pass
