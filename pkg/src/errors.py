"""
Exception hierarchy for the vertex-frequency toolkit.

Every error carries an ``exit_code`` so the CLI can translate exceptions
into process exit codes in one place:

    2  usage / invalid arguments
    3  graph generation failure
    4  data mismatch (dimensions, indices, file contents)
    5  numerical failure
"""

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_GENERATION = 3
EXIT_DATA = 4
EXIT_NUMERICAL = 5


class VertexFrequencyError(Exception):
    """Base class for all toolkit errors."""

    exit_code = EXIT_NUMERICAL


# =============================================================================
# Graph construction
# =============================================================================

class GraphError(VertexFrequencyError):
    exit_code = EXIT_DATA


class DisconnectedGraph(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class NonPositiveWeight(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class InfeasibleSpec(VertexFrequencyError):
    exit_code = EXIT_USAGE


class ConnectivityRetriesExceeded(VertexFrequencyError):
    exit_code = EXIT_GENERATION


# =============================================================================
# Spectral / operators
# =============================================================================

class NotSymmetric(VertexFrequencyError):
    pass


class EigensolverFailure(VertexFrequencyError):
    pass


class DimensionMismatch(VertexFrequencyError):
    exit_code = EXIT_DATA


class IndexOutOfRange(VertexFrequencyError):
    exit_code = EXIT_DATA


class VariantMismatch(VertexFrequencyError):
    exit_code = EXIT_USAGE


class ZeroKernel(VertexFrequencyError):
    pass


class DisconnectedDual(VertexFrequencyError):
    pass


class UnsupportedKernelForm(VertexFrequencyError):
    exit_code = EXIT_USAGE


class WrongKernelForm(UnsupportedKernelForm):
    pass


# =============================================================================
# Transform / localization / clustering
# =============================================================================

class ZeroWindow(VertexFrequencyError):
    pass


class ZeroSignal(VertexFrequencyError):
    exit_code = EXIT_DATA


class ZeroMeanWindow(VertexFrequencyError):
    pass


class NearSingularNorm(VertexFrequencyError):
    pass


class SameVertex(VertexFrequencyError):
    exit_code = EXIT_DATA


class DegenerateDegrees(VertexFrequencyError):
    pass


class ZeroDC(VertexFrequencyError):
    pass


class BadK(VertexFrequencyError):
    exit_code = EXIT_USAGE


class BadBand(VertexFrequencyError):
    exit_code = EXIT_USAGE


class BoundViolation(VertexFrequencyError):
    """A proven inequality failed beyond floating-point tolerance."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
