"""Steklov spectra of graphs with boundary.

The package computes Dirichlet-to-Neumann matrices and their spectra,
refines triangulated surfaces by hexagon subdivision, builds random path
immersions realizing the eigenvalue comparison bound, certifies planar
lambda_2 bounds through circle packings and Möbius normalization, measures
effective resistance two independent ways, and ships generators plus a CLI
for sweep experiments over genus families.
"""

__version__ = "0.1.0"

from .errors import (
    BoundaryMismatch,
    BrokenPath,
    CentroidNotZero,
    ConvergenceError,
    ConvergenceFailure,
    Disconnected,
    DuplicateEdge,
    EmptyBoundary,
    EndpointMismatch,
    IndexOutOfRange,
    MalformedRotation,
    NonCycleFace,
    NonzeroGenus,
    NormalizationFailure,
    NotTriangulated,
    SameVertex,
    SchemaError,
    SelfLoop,
    SingularInterior,
    SteklovError,
    TooSmall,
    ValidationError,
    ZeroBoundaryNorm,
)
from .graphs import (
    BoundaryGraph,
    RotationGraph,
    build_boundary_graph,
    build_rotation_graph,
    genus,
    is_connected,
    is_fully_triangulated,
    laplacian,
    trace_faces,
    with_boundary,
)
from .spectrum import (
    DtNMatrix,
    SteklovSpectrum,
    dtn_matrix,
    lambda_k,
    rayleigh_quotient,
    steklov_spectrum,
    vector_rayleigh_bound,
)
from .refine import (
    RefinedGraph,
    boundary_growth,
    fully_triangulate,
    hex_subdivide,
    refine,
)
from .immersion import (
    Immersion,
    chain_bound,
    comparison_bound,
    random_immersion,
    verify_immersion,
)
from .packing import (
    CirclePacking,
    SphereConfiguration,
    certify_planar_bound,
    circle_pack,
    lift_to_sphere,
    mobius_normalize,
    packing_svg,
)
from .resistance import (
    ResistanceResult,
    effective_resistance,
    resistance_genus_floor,
)
from .harness import (
    CSV_HEADER,
    GraphDocument,
    SweepRecord,
    document_to_graph,
    gen_genus,
    gen_sphere,
    gen_torus,
    graph_to_document,
    icosahedron,
    max_instance_size,
    octahedron,
    parse_document,
    records_to_csv,
    serialize_document,
    sweep_main_bound,
    sweep_svg,
    tetrahedron,
)
from .cli import cli

__all__ = [
    "__version__",
    # errors
    "SteklovError", "ValidationError", "ConvergenceError",
    "EmptyBoundary", "SelfLoop", "DuplicateEdge", "IndexOutOfRange",
    "MalformedRotation", "Disconnected", "SingularInterior",
    "ZeroBoundaryNorm", "CentroidNotZero", "ConvergenceFailure",
    "NotTriangulated", "NonCycleFace", "BrokenPath", "EndpointMismatch",
    "BoundaryMismatch", "NonzeroGenus", "NormalizationFailure",
    "SameVertex", "TooSmall", "SchemaError",
    # graphs
    "BoundaryGraph", "RotationGraph", "build_boundary_graph",
    "build_rotation_graph", "with_boundary", "laplacian", "trace_faces",
    "genus", "is_connected", "is_fully_triangulated",
    # spectrum
    "DtNMatrix", "SteklovSpectrum", "dtn_matrix", "steklov_spectrum",
    "lambda_k", "rayleigh_quotient", "vector_rayleigh_bound",
    # refine
    "RefinedGraph", "fully_triangulate", "hex_subdivide", "refine",
    "boundary_growth",
    # immersion
    "Immersion", "verify_immersion", "comparison_bound",
    "random_immersion", "chain_bound",
    # packing
    "CirclePacking", "SphereConfiguration", "circle_pack",
    "lift_to_sphere", "mobius_normalize", "certify_planar_bound",
    "packing_svg",
    # resistance
    "ResistanceResult", "effective_resistance", "resistance_genus_floor",
    # harness
    "GraphDocument", "SweepRecord", "parse_document", "serialize_document",
    "document_to_graph", "graph_to_document", "gen_sphere", "gen_torus",
    "gen_genus", "tetrahedron", "octahedron", "icosahedron",
    "sweep_main_bound", "records_to_csv", "sweep_svg", "CSV_HEADER",
    "max_instance_size",
    # cli
    "cli",
]
