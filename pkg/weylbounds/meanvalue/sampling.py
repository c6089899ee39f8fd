"""Reproducible Monte Carlo integration over T_d.

Sample points live on the dyadic lattice (Z / 2^31)^d, where phases are
exact and the moments of S_d coincide with the continuous ones as long as
s * N^d < 2^31. Every block of samples draws from a counter-based Philox
stream keyed by (seed, block index), so the estimate depends only on the
seed and the sample count, never on the thread schedule.
"""

import logging
import math
from typing import Callable, Tuple

import numpy as np
from tqdm import tqdm

from weylbounds.core.phase import check_degree
from weylbounds.core.sweep import ordered_map
from weylbounds.errors import InvalidParameterError

logger = logging.getLogger(__name__)

TORUS_DENOMINATOR = 2 ** 31
MC_BLOCK_SIZE = 4096
SEED_LIMIT = 2 ** 64

Functional = Callable[[np.ndarray], np.ndarray]


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise InvalidParameterError(f"seed must be an integer, got {seed!r}")
    if not 0 <= seed < SEED_LIMIT:
        raise InvalidParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return int(seed)


def new_seed() -> int:
    return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=check_seed(seed) | (block << 64)))


def torus_block(seed: int, block: int, size: int, d: int) -> np.ndarray:
    """Lattice numerators of ``size`` uniform points; denominators are 2^31."""
    return block_generator(seed, block).integers(
        0, TORUS_DENOMINATOR, size=(size, d), dtype=np.int64
    )


def mc_values(
    functional: Functional,
    d: int,
    samples: int,
    seed: int,
    workers: int = 1,
    block_size: int = MC_BLOCK_SIZE,
) -> np.ndarray:
    """``functional`` at ``samples`` uniform lattice points, in sample order."""
    check_degree(d)
    check_seed(seed)
    if samples < 2:
        raise InvalidParameterError(f"need at least 2 samples, got {samples}")
    n_blocks = math.ceil(samples / block_size)

    def evaluate(block: int) -> np.ndarray:
        size = min(block_size, samples - block * block_size)
        return np.asarray(functional(torus_block(seed, block, size, d)), dtype=np.float64)

    return np.concatenate(
        list(
            tqdm(
                ordered_map(evaluate, range(n_blocks), workers),
                total=n_blocks,
                desc="Monte Carlo blocks",
                disable=None,
            )
        )
    )


def mc_integrate(
    functional: Functional,
    d: int,
    samples: int,
    seed: int,
    workers: int = 1,
    block_size: int = MC_BLOCK_SIZE,
) -> Tuple[float, float]:
    """Mean of ``functional`` over T_d and its standard error."""
    values = mc_values(functional, d, samples, seed, workers, block_size)
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / math.sqrt(samples))
    return mean, stderr
