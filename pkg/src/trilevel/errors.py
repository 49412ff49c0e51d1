"""Exception types shared across the package."""


class DegenerateBasisError(ValueError):
    """The partial dressed basis is undefined (coupling block is zero)."""


class UndefinedAngleError(ValueError):
    """Dipole angle is undefined because one decay channel is dark."""


class PropagationError(RuntimeError):
    """Density-matrix propagation produced an invalid state."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (at t = {time:g})")
        self.time = time


class NonUniqueSteadyStateError(RuntimeError):
    """Liouvillian null space has dimension != 1."""

    def __init__(self, dimension: int):
        super().__init__(
            f"steady state is not unique: null space has dimension {dimension}"
        )
        self.dimension = dimension


class ScenarioError(ValueError):
    """A scenario file failed validation; `field` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
