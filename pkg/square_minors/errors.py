"""
Exception hierarchy for the square-minors toolkit.

Every error raised on purpose by the package derives from SquareMinorsError so
the CLI can map it onto an exit status:

- input and format errors (bad vertex ids, malformed documents)
- resource errors (window vertex budget)
- construction errors (no connector inside the window)
- theorem-level check failures (exit status 1)
- configuration errors (exit status 3)

Internal invariant violations are plain AssertionErrors: they indicate a bug.
Experiments re-raise them from worker threads as InternalCheckError (exit
status 4).
"""


class SquareMinorsError(Exception):
    """Base class for all deliberate errors of the package."""


class GraphInputError(SquareMinorsError, ValueError):
    """A graph operation received a vertex id or path it cannot work with."""


class GraphFormatError(SquareMinorsError, ValueError):
    """A graph, model or certificate document could not be decoded."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class ResourceError(SquareMinorsError):
    """A configured resource limit was hit."""


class WindowBudgetError(ResourceError):
    """A window would contain more vertices than the configured budget."""

    def __init__(self, family: str, radius: int, budget: int):
        self.family = family
        self.radius = radius
        self.budget = budget
        super().__init__(
            f"window of {family} at radius {radius} exceeds the vertex budget "
            f"window_vertex_budget={budget}"
        )


class RayInputError(SquareMinorsError, ValueError):
    """Invalid parameters for a ray search."""


class ConstructionError(SquareMinorsError):
    """The square-minor construction could not proceed inside the window."""

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        self.pair = pair
        super().__init__(message)


class QiInputError(SquareMinorsError, ValueError):
    """A quasi-isometry certificate does not fit the windows it is checked on."""


class BoundInputError(SquareMinorsError, ValueError):
    """Bound parameters outside the domain of the chosen formula variant."""


class ConfigError(SquareMinorsError, ValueError):
    """An experiment configuration is malformed."""


class TheoremCheckError(SquareMinorsError):
    """A theorem-level check failed during an experiment."""


class InternalCheckError(SquareMinorsError):
    """An internal invariant failed inside an experiment worker."""
