"""Exception types shared across the package."""


class OutOfBoundsError(ValueError):
    """A point or path strayed outside its required region; carries the point."""

    def __init__(self, point, message=None):
        self.point = complex(point)
        super().__init__(
            message or f"path escapes the grid bounding box at {self.point}"
        )


class BandTooThinError(ValueError):
    """Requested boundary band is thinner than the grid can resolve."""


class ResolutionError(ValueError):
    """Requested radius or step is below what the grid can resolve."""


class SingularityError(ValueError):
    """Kernel evaluated at a singular configuration."""


class DegenerateSampleError(RuntimeError):
    """Every importance weight vanished, so the estimate is undefined."""


class ConfigError(ValueError):
    """Invalid experiment configuration; carries every violation found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
