"""Auerbach bases of l^n_p."""

from .canonical import CanonicalClass, Label, canonical_form, row_equivalence_count, same_orbit
from .classification import (
    L3Classification,
    StrongType,
    VectorType,
    classify_l3_basis,
    classify_l3_vector,
    classify_strong_vector,
    is_spherical_point,
    is_strong_auerbach,
    row_equivalence_total,
    subspace_isometric_lp,
    ww_lower_bound_check,
)
from .constructions import (
    RpRoot,
    block_basis,
    enumerate_stationary,
    hadamard2_basis,
    identity_basis,
    is_stationary,
    jinf_basis,
    jp_basis,
    known_constructions,
    nested_h2_basis,
    solve_rp,
    substitute_basis,
    sylvester_double,
    weighing_check,
)
from .core import (
    DEFAULT_TOL,
    INFINITY,
    ONE,
    BasisMatrix,
    PExponent,
    ToleranceConfig,
    dual_exponent,
    p_map,
    p_norm,
    semi_inner_product,
    unit_rows,
)
from .errors import (
    AuerbachError,
    ConsistencyError,
    DomainError,
    PreconditionError,
    RankError,
    ShapeError,
    SizeError,
)
from .orthogonality import (
    AuerbachReport,
    DualBasis,
    OrthogonalityVerdict,
    bj_directional,
    bj_minimization_oracle,
    bj_orthogonal_smooth,
    criticality_residual,
    dual_basis,
    golden_section_min,
    is_auerbach,
)
from .solver import (
    Census,
    ContinuationTrace,
    SolveReport,
    Status,
    continuation_track,
    dualize_solution,
    jacobian,
    multistart_enumerate,
    newton_solve,
    residual,
    run_census,
)

__version__ = "0.1.0"
