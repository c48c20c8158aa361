"""Exception types raised across the package."""


class MajsimError(Exception):
    """Base class for all package errors."""


class GraphError(MajsimError, ValueError):
    pass


class InvalidSizeError(GraphError):
    """Generator parameters describe a graph that cannot exist."""


class ConnectivityError(GraphError):
    pass


class EdgeListFormatError(GraphError):
    pass


class AdjacencyError(MajsimError, ValueError):
    """A selected neighbour is not adjacent to the selected agent."""


class ParameterError(MajsimError, ValueError):
    pass


class CapacityError(MajsimError, ValueError):
    """State space too large to enumerate."""


class AbsorptionTimeout(MajsimError, RuntimeError):
    """A trajectory exhausted its step budget before absorbing.

    The partially advanced run is kept on ``record`` for diagnostics.
    """

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record
