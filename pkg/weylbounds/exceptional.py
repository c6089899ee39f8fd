"""Finite-N views of how rarely |S_d(x; N)| is large.

For almost every x the sum is N^{1/2+o(1)}, so the measure of
{x : |S_d(x; N)| >= N^α} should shrink for α > 1/2 and the typical growth
exponent log|S_d| / log N should sit near 1/2. These are proxies at a single
N, not statements about limsup sets.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Sequence

import numpy as np

from weylbounds.core.phase import PhasePoint, SumParams, lattice_phase_matrix
from weylbounds.core.sums import weyl_sum_fast
from weylbounds.errors import InvalidParameterError
from weylbounds.meanvalue.sampling import TORUS_DENOMINATOR, mc_integrate, mc_values

logger = logging.getLogger(__name__)


@dataclass
class SuperlevelFraction:
    fraction: float
    stderr: float
    samples: int
    d: int
    N: int
    alpha: float
    seed: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class GrowthPoint:
    N: int
    median: float
    lower_quartile: float
    upper_quartile: float
    zero_sums: int


@dataclass
class GrowthProfile:
    d: int
    samples: int
    seed: int
    points: List[GrowthPoint]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _modulus_functional(d: int, N: int):
    denominators = (TORUS_DENOMINATOR,) * d

    def functional(numerators: np.ndarray) -> np.ndarray:
        return np.abs(lattice_phase_matrix(numerators, denominators, N).sum(axis=1))

    return functional


def superlevel_fraction(
    d: int, N: int, alpha: float, samples: int, seed: int, workers: int = 1
) -> SuperlevelFraction:
    """Monte Carlo measure of {x : |S_d(x; N)| >= N^α} with its binomial error."""
    params = SumParams(d, N)
    if not 0 < alpha <= 1:
        raise InvalidParameterError(f"alpha must lie in (0, 1], got {alpha}")
    modulus = _modulus_functional(params.d, params.N)
    threshold = float(params.N) ** alpha

    def indicator(numerators: np.ndarray) -> np.ndarray:
        return (modulus(numerators) >= threshold).astype(np.float64)

    fraction, stderr = mc_integrate(indicator, params.d, samples, seed, workers)
    logger.debug(f"N={N}, alpha={alpha}: superlevel fraction {fraction:.4g} +- {stderr:.2g}")
    return SuperlevelFraction(fraction, stderr, samples, params.d, params.N, alpha, seed)


def growth_exponent(x: PhasePoint, N: int) -> float:
    """log|S_d(x; N)| / log N; -inf when the sum vanishes."""
    params = SumParams(x.d, N)
    if params.N < 2:
        raise InvalidParameterError("growth exponent needs N >= 2")
    modulus = abs(weyl_sum_fast(x, params.N))
    if modulus == 0:
        return -math.inf
    return math.log(modulus) / math.log(params.N)


def growth_profile(
    d: int, Ns: Sequence[int], samples: int, seed: int, workers: int = 1
) -> GrowthProfile:
    """Quartiles of log|S_d| / log N over random x, for each N."""
    points = []
    for N in Ns:
        params = SumParams(d, N)
        if params.N < 2:
            raise InvalidParameterError("growth exponent needs N >= 2")
        moduli = mc_values(_modulus_functional(params.d, params.N), params.d, samples, seed, workers)
        nonzero = moduli[moduli > 0]
        exponents = np.log(nonzero) / math.log(params.N)
        lower, median, upper = np.quantile(exponents, [0.25, 0.5, 0.75])
        points.append(
            GrowthPoint(
                N=params.N,
                median=float(median),
                lower_quartile=float(lower),
                upper_quartile=float(upper),
                zero_sums=int(moduli.size - nonzero.size),
            )
        )
        logger.info(f"N={N}: median growth exponent {median:.4f}")
    return GrowthProfile(d=d, samples=samples, seed=seed, points=points)
