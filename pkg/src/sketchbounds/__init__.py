"""sketchbounds: sparse sketching matrices, their exact quality measures,
witness searches that certify or refute their properties, and closed-form
bound evaluators."""

from .errors import (
    BadArgs,
    BadConfig,
    DegenerateColumn,
    DimensionMismatch,
    EmptyIndexSet,
    Exhausted,
    IndexOutOfRange,
    Infeasible,
    InvalidDimension,
    InvalidSparsity,
    InvalidT,
    NoScaleFound,
    NonpositiveThreshold,
    NotDivisible,
    NotNormalized,
    NotSignMatrix,
    PreconditionViolated,
    RangeError,
    ShapeMismatch,
    SketchboundsError,
    TooFewColumns,
    TooFewWords,
    TooLarge,
    TooManySupports,
    ZeroColumn,
)
from .matrices import (
    SparseMatrix,
    OneSparseMap,
    apply,
    canonical_json,
    column_norms,
    column_sparsity,
    normalize_columns,
    stream_update,
    matrix_to_json,
    matrix_from_json,
    load_matrix,
    save_matrix,
    one_sparse_map_to_json,
    one_sparse_map_from_json,
    load_one_sparse_map,
    save_one_sparse_map,
)
from .constructions import (
    Code,
    OsnapReport,
    code_from_json,
    code_max_agreement,
    code_to_incoherent,
    code_to_json,
    load_code,
    random_code,
    sample_coordinate_subspace,
    sample_countsketch,
    sample_osnap_block,
    sample_sparse_sign_jl,
    save_code,
    spread_vectors,
    verify_osnap_properties,
)
from .measures import (
    RipEstimate,
    RowMassProfile,
    ScaleProfile,
    check_unit_columns,
    coherence,
    dyadic_scale_count,
    rip_constant_exact,
    rip_constant_lower_estimate,
    row_mass_profile,
    scale_profile,
    subspace_distortion,
)
from .witnesses import (
    TTYPE_GROUP_CONSTANT,
    Certificate,
    OseFailureReport,
    PatternAtScale,
    TrialRecord,
    TType,
    none_certificate,
    ose_collision_witness,
    ose_failure_probability,
    pattern_at_scale,
    rip_pattern_witness,
    row_mass_violation_search,
    sign_pattern_certify,
    ttype_collision_certify,
    ttype_count_bound,
    ttype_of,
    verify_certificate,
)
from .bounds import (
    FORMULAS,
    BoundValue,
    code_size_exponents,
    incoherent_rows_lower,
    jl_sparsity_lower,
    min_sparsity_from_inequality,
    rip_rows_lower,
    rip_sparsity_lower,
)
from .rng import check_seed, derive_seed, substream

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
