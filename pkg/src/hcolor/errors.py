"""Exception hierarchy shared across the package."""


class HColorError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(HColorError, ValueError):
    """A structural or numeric parameter is invalid (bad sizes, ranges, kinds)."""


class GraphFormatError(HColorError, ValueError):
    """A graph / constraint-graph / configuration file violates its schema."""


class ConstraintGraphError(HColorError, ValueError):
    """A constraint graph is unusable for modeling."""


class FullyLooseConstraintError(ConstraintGraphError):
    """The constraint graph is complete with every self-loop: no hard constraint.

    Models require at least one forbidden color pair; a fully loose constraint
    graph makes the activity parameters unidentifiable from allowed-set data.
    """


class DisconnectedConstraintError(ConstraintGraphError):
    """The constraint graph is disconnected; estimation theory assumes connectivity."""


class InvalidConfigurationError(HColorError, ValueError):
    """A configuration violates the hard constraints of the model."""


class InfeasibleModelError(HColorError):
    """No valid configuration exists (verified exhaustively)."""


class FeasibilityUnknownError(HColorError):
    """The search budget was exhausted before feasibility could be decided."""


class EnumerationCapError(HColorError):
    """Exact enumeration exceeded the allowed number of node expansions."""
