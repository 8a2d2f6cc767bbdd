"""Exception types shared across the package."""


class TGraphError(Exception):
    """Base class for all package errors."""


class SlopeError(ValueError, TGraphError):
    """Invalid slope triple (p_a, p_b, p_c)."""


class AdjacencyError(ValueError, TGraphError):
    """Vertices passed to an edge-level operation are not adjacent."""


class DegeneracyError(TGraphError):
    """The twist collapses part of the T-graph.

    Carries the offending lattice coordinates in ``vertices``.
    """

    def __init__(self, msg, vertices=()):
        super().__init__(msg)
        self.vertices = list(vertices)


class WindowError(TGraphError):
    """Operation needs lattice data outside the built window."""


class TruncationError(TGraphError):
    """A walk touched the window boundary before its stopping rule fired."""

    def __init__(self, msg, partial_path=None):
        super().__init__(msg)
        self.partial_path = partial_path


class ConnectivityError(TGraphError):
    """Root not reachable, or vertices in different tree components."""


class TopologyError(TGraphError):
    """Forest/dual-forest structure violates the expected topology."""


class GeometryError(TGraphError):
    """Ill-posed geometric input (zero-length steps, ambiguous sides)."""


class ConsistencyError(TGraphError):
    """An internal identity that must hold by construction failed."""


class ResolutionError(TGraphError):
    """Domain features too small for the requested corridor/scale."""


class SizeCapError(TGraphError):
    """Exact enumeration requested beyond its size cap."""


class NumericError(TGraphError):
    """A linear solve or fit failed to reach the required residual."""

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual
