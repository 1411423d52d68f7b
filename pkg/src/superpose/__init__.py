"""Linear compressed sensing: embedding/probe pairs, exact worst-case decoding
error over k-sparse inputs, and the constructions and diagnostics around it."""

__version__ = "0.1.0"

from .binary_threshold import (
    MarginReport,
    brute_force_margins,
    monotone_transform_separation,
    separation_margins,
)
from .constructions import (
    ConstructionSpec,
    dimension_for_incoherence,
    gaussian_unit_matrix,
    rademacher_matrix,
    shifted_pair,
    shifted_pair_dimension,
)
from .core import CoherenceSummary, SparseVector, as_matrix, coherence, two_feature_pair, gram, normalize_columns
from .geometry import GeometryReport, cosine, verify_construction_geometry, verify_norm_bounded_geometry
from .interference import (
    InterferenceGraph,
    build_graph,
    greedy_independent_set,
    independence_number,
    max_row_interferers,
    turan_edge_floor,
)
from .io import load_matrix, save_matrix
from .nonlinear_baseline import DecodeResult, gap_experiment, l1_decode, omp_decode
from .recovery import (
    PhaseScanResult,
    RecoveryReport,
    brute_force_error,
    min_dimension_scan,
    recovery_check,
    worst_case_error,
)
