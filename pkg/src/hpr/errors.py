"""Exception hierarchy shared across the solver."""


class HPRError(Exception):
    """Base class for all solver errors."""


class DomainError(HPRError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class DegenerateDistortionError(DomainError):
    """det(A) <= 0: the distortion field has collapsed."""


class InconsistentParametersError(HPRError, ValueError):
    """Material parameters contradict each other (e.g. mu > 0 with cs = 0)."""


class NoRealSolutionError(DomainError):
    """A parameter fit has no real solution (e.g. c_inf <= c0)."""


class HyperbolicityLossError(HPRError):
    """The characteristic cubic has complex roots; convexity is violated."""


class UnphysicalStateError(HPRError):
    """A conserved state cannot be inverted to admissible primitives.

    Carries the flat cell index (or node index) of the first offending cell
    when the failure occurs inside a field-level operation.
    """

    def __init__(self, message: str, cell: tuple | int | None = None):
        self.cell = cell
        if cell is not None:
            message = f"{message} (cell {cell})"
        super().__init__(message)


class PredictorFailureError(HPRError):
    """The local space-time predictor did not converge.

    Carries the offending cell index and the final Picard residual.
    """

    def __init__(self, message: str, cell: tuple | int | None = None,
                 residual: float | None = None):
        self.cell = cell
        self.residual = residual
        extra = []
        if cell is not None:
            extra.append(f"cell {cell}")
        if residual is not None:
            extra.append(f"residual {residual:.3e}")
        if extra:
            message = f"{message} ({', '.join(extra)})"
        super().__init__(message)


class ConfigError(HPRError, ValueError):
    """Malformed or contradictory run configuration."""


class SolverFailureError(HPRError):
    """The time loop aborted after exhausting its retry budget."""
