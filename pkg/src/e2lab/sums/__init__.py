from .bilinear import (
    bilinear,
    cauchy_check,
    check_hypotheses,
    check_type2_window,
    decomposition_error,
    diagonal_terms,
    naive_grid,
    naive_triple,
    s1_decompose,
    s2_sum,
    type1,
    type1_smooth,
    type1_variant,
    type2,
    type2_window,
    variant_rows,
)
from .harmonic import (
    F_eval,
    F_naive,
    g_hat_bound,
    h_derivative_bound,
    sample_outer,
    g_hat,
    g_hat_direct,
    g_hat_n1_derivative,
    h_n1_derivative,
    h_n1_derivative_fd,
    h_weight,
    harmonic_T,
    harmonic_T_direct,
    harmonic_T_naive,
    zerosum_check,
)
from .report import (
    CSV_FIELDS,
    ONE,
    VARPI,
    VARPI_MINUS_ONE,
    ZERO,
    BumpWeight,
    CoefficientSpec,
    SumReport,
    coefficient_from_name,
    to_json,
    write_csv,
)
from .s10 import S10Result, exponent_fit, inner_sums, s10
from .window import (
    DEFAULT_ETA,
    TAU_LIMIT,
    admissible_window,
    check_tau,
    truncation_ranges,
    truncation_tail,
    window_centre,
)
