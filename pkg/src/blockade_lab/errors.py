"""Exception types shared across the package."""


class BlockadeError(Exception):
    """Base class for failures specific to this package."""


class TruncationError(BlockadeError):
    """The Fock-space truncation is too small for the requested state or evolution."""


class StiffnessError(BlockadeError):
    """The adaptive step size underflowed; the problem is too stiff for explicit RK."""


class NonUniqueSteadyStateError(BlockadeError):
    """The generator's null space is degenerate, so no unique steady state exists."""


class ScenarioParseError(BlockadeError):
    """A scenario file could not be parsed or violates a model invariant."""


class CatalogError(BlockadeError):
    """An unknown scenario name was requested from the builtin catalog."""
