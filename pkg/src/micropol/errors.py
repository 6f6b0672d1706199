"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid grid, parameter, or run configuration."""


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap before reaching tolerance."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual {residual:.3e} after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations


class StepSizeError(RuntimeError):
    """A transport or momentum step was asked to exceed its CFL limit."""


class CflCollapseError(RuntimeError):
    """Adaptive time stepping drove dt below the configured floor."""

    def __init__(self, message: str, t: float, dt: float, state=None):
        super().__init__(message)
        self.t = t
        self.dt = dt
        self.state = state
