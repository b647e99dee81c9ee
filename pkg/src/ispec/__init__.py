"""Exact critical temperatures and correlations for periodic 2D Ising models.

The pipeline decorates the lattice into a Fisher graph, signs it with a
clockwise-odd orientation, and reads thermodynamics off the dimer spectral
curve; correlations come from block Toeplitz determinants of the inverse
Kasteleyn symbol. Everything is cross-checked against brute-force oracles.
"""

from .correlation import (
    CorrelationResult,
    ToeplitzSymbol,
    build_symbol,
    corr_sq_from_symbol,
    decay_fit,
    edge_probability,
    edge_probability_torus,
    spin_corr_sq,
    toeplitz_hankel_residual,
    widom_limit,
)
from .errors import (
    BijectionFailure,
    DimensionMismatch,
    DualityViolation,
    IspecError,
    MalformedDocument,
    NearSingular,
    NodeNotFound,
    NonOrientable,
    NonPositiveCoupling,
    NonPositiveResidual,
    NoSignChange,
    NotSkew,
    OddDimension,
    TooLarge,
    WeightOutOfRange,
)
from .fishergraph import (
    EDGE_TAGS,
    FisherEdge,
    FisherGraph,
    FisherVertex,
    complete_matching,
    dump_edges,
    fisher_graph,
    polygon_to_dimer,
)
from .linalg import det, fourier_coeffs, inverse_entries, pfaffian
from .model import (
    HIGH_TEMP,
    LOW_TEMP,
    EdgeWeightMap,
    PeriodicIsingModel,
    dual_model,
    dualize,
    make_model,
    parse_model,
    replicate,
    weights,
)
from .oracle import (
    enumerate_dimer,
    enumerate_spin,
    even_subgraphs,
    hightemp_z,
    lee_yang_check,
    transfer_corr,
    transfer_torus_corr,
)
from .spectral import (
    CORNERS,
    CornerReport,
    DualityReport,
    KasteleynOperator,
    NodeReport,
    ScanReport,
    assemble,
    corner_pfaffians,
    critical_beta,
    duality_check,
    eval_P,
    grid_values,
    node_hessian,
    scan_torus,
    sector_weights,
    special_corner,
    torus_partition,
)

__all__ = [
    "BijectionFailure",
    "CORNERS",
    "CornerReport",
    "CorrelationResult",
    "DimensionMismatch",
    "DualityReport",
    "DualityViolation",
    "EDGE_TAGS",
    "EdgeWeightMap",
    "FisherEdge",
    "FisherGraph",
    "FisherVertex",
    "HIGH_TEMP",
    "IspecError",
    "KasteleynOperator",
    "LOW_TEMP",
    "MalformedDocument",
    "NearSingular",
    "NodeNotFound",
    "NodeReport",
    "NonOrientable",
    "NonPositiveCoupling",
    "NonPositiveResidual",
    "NoSignChange",
    "NotSkew",
    "OddDimension",
    "PeriodicIsingModel",
    "ScanReport",
    "ToeplitzSymbol",
    "TooLarge",
    "WeightOutOfRange",
    "assemble",
    "build_symbol",
    "complete_matching",
    "corner_pfaffians",
    "corr_sq_from_symbol",
    "critical_beta",
    "decay_fit",
    "det",
    "dual_model",
    "duality_check",
    "dualize",
    "dump_edges",
    "edge_probability",
    "edge_probability_torus",
    "enumerate_dimer",
    "enumerate_spin",
    "eval_P",
    "even_subgraphs",
    "fisher_graph",
    "fourier_coeffs",
    "grid_values",
    "hightemp_z",
    "inverse_entries",
    "lee_yang_check",
    "make_model",
    "node_hessian",
    "parse_model",
    "pfaffian",
    "polygon_to_dimer",
    "replicate",
    "scan_torus",
    "sector_weights",
    "special_corner",
    "spin_corr_sq",
    "toeplitz_hankel_residual",
    "torus_partition",
    "transfer_corr",
    "transfer_torus_corr",
    "weights",
    "widom_limit",
]

__version__ = "0.1.0"
