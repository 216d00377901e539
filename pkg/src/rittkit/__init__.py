"""rittkit: square functions, Stolz functional calculus and column/row
decompositions for Ritt operators on truncated Schatten classes."""

from .blocknorm import (
    RadBracket,
    column_norm,
    duality_check,
    op_matrix_apply,
    rad_norm_bracket,
    regular_norm,
    row_norm,
)
from .decomp import (
    DecompResult,
    Z_apply,
    Z_star_apply,
    decompose,
    hankel_regular_check,
    power_series_partial,
    reconstruct_identity,
    reconstruction_partial,
)
from .markov import (
    MarkovCertificate,
    MarkovMap,
    choi_matrix,
    fixed_point_compression,
    markov_decomposition_demo,
    schur_markov,
    unitary_mixture_markov,
    validate_markov,
)
from .matcore import (
    Exponent,
    conjugate_exponent,
    modulus,
    primary_matrix_function,
    schatten_norm,
    singular_values,
    spectral_radius,
    trace_pairing,
)
from .ritt import (
    RittReport,
    StolzDomain,
    cb_lower_bound,
    col_bound_sample,
    fc_lower_bound,
    fc_upper_bound,
    fractional_power,
    min_stolz_angle,
    poly_apply,
    poly_eval,
    ritt_constants,
    row_bound_sample,
    stolz_membership,
)
from .sqfun import SqResult, SqSpec, alpha_equivalence_experiment, sq_sequence, square_function
from .stolzexample import (
    GrowthTable,
    a_norm_bounds,
    growth_experiment,
    make_diag_a,
    matrix_A,
    rank_one_test,
)
from .superop import NormBracket, SpectrumHit, SuperOp

__version__ = "0.1.0"
