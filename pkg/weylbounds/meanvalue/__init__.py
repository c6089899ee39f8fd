from .moments import (
    ExponentFit,
    MomentEstimate,
    completed_moment,
    mc_moment,
    moment_exponent_fit,
    moment_series,
    s_of,
)
from .sampling import MC_BLOCK_SIZE, TORUS_DENOMINATOR, mc_integrate, mc_values, new_seed
from .vinogradov import (
    DEFAULT_ENUMERATION_CAP,
    VinogradovCount,
    vinogradov_count,
    vinogradov_count_naive,
)
