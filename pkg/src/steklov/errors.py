"""Exception types shared across the toolkit.

Two broad families: validation errors (bad inputs, violated preconditions)
and convergence errors (iterative schemes that failed to reach tolerance).
The CLI maps these to exit codes 1 and 2 respectively.
"""


class SteklovError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(SteklovError, ValueError):
    """Input rejected before any computation ran."""


class ConvergenceError(SteklovError, RuntimeError):
    """An iterative scheme stopped short of its declared tolerance."""


# -- graph construction ------------------------------------------------------

class EmptyBoundary(ValidationError):
    """The boundary vertex set must be non-empty."""


class SelfLoop(ValidationError):
    """Edges must join two distinct vertices."""


class DuplicateEdge(ValidationError):
    """Each undirected edge may appear at most once."""


class IndexOutOfRange(ValidationError):
    """A vertex index fell outside [0, n)."""


class MalformedRotation(ValidationError):
    """A rotation must list each vertex's neighbours exactly once."""


class Disconnected(ValidationError):
    """Operation requires a connected graph."""


# -- spectra -----------------------------------------------------------------

class SingularInterior(ValidationError):
    """Some component of the graph contains no boundary vertex, so the
    interior block of the Laplacian is singular."""


class ZeroBoundaryNorm(ValidationError):
    """A Rayleigh quotient needs a test function with nonzero boundary norm."""


class CentroidNotZero(ValidationError):
    """Vector-valued Rayleigh bounds require the boundary values to sum to
    (approximately) zero."""


class ConvergenceFailure(ConvergenceError):
    """An eigensolve or fixed-point iteration failed to converge."""


# -- triangulation / refinement ---------------------------------------------

class NotTriangulated(ValidationError):
    """Operation requires every face of the embedding to be a triangle."""


class NonCycleFace(ValidationError):
    """A face boundary walk could not be completed to triangles."""


# -- immersions --------------------------------------------------------------

class BrokenPath(ValidationError):
    """A mapped path is not a valid edge-simple walk in the host graph."""


class EndpointMismatch(ValidationError):
    """A path's endpoints disagree with the vertex map."""


class BoundaryMismatch(ValidationError):
    """The vertex map does not carry the source boundary onto the host
    boundary."""


# -- circle packing ----------------------------------------------------------

class NonzeroGenus(ValidationError):
    """Planar circle packing is only available for genus-zero embeddings."""


class NormalizationFailure(ConvergenceError):
    """No sphere-preserving transformation driving the centroid to zero was
    found (descent stalled or the configuration is degenerate)."""


# -- resistance --------------------------------------------------------------

class SameVertex(ValidationError):
    """Effective resistance needs two distinct terminals."""


# -- harness -----------------------------------------------------------------

class TooSmall(ValidationError):
    """Generator parameters below the minimum feasible size."""


class SchemaError(ValidationError):
    """A graph document violated the JSON schema; message carries the
    offending position."""
