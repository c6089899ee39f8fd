from .phase import (
    MAX_DEGREE,
    MIN_DEGREE,
    PhasePoint,
    SumParams,
    eval_phase,
    lattice_phase_matrix,
    lattice_points,
    phase_matrix,
    phase_sequence,
)
from .sums import WeightSequence, weyl_sum_direct, weyl_sum_fast, weyl_sum_weighted
from .sweep import GridSpec, grid_sweep, modulus_reducer, ordered_map, sweep_blocks
