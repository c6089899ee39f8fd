"""Monte Carlo moments of Weyl sums and completed sums, and exponent fits."""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from weylbounds.completion import DEFAULT_MODE, CompletionMode, completed_values, weight_mass
from weylbounds.core.phase import SumParams, lattice_phase_matrix
from weylbounds.core.sums import WeightSequence
from weylbounds.errors import InvalidParameterError
from weylbounds.meanvalue.sampling import TORUS_DENOMINATOR, mc_integrate

logger = logging.getLogger(__name__)

MAX_LOG_MOMENT = math.log(np.finfo(np.float64).max)


def s_of(d: int) -> int:
    """s(d) = d(d+1)/2."""
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or d < 1:
        raise InvalidParameterError(f"s(d) needs an integer d >= 1, got {d!r}")
    return int(d) * (int(d) + 1) // 2


@dataclass
class MomentEstimate:
    mean: float
    stderr: float
    samples: int
    s: int
    N: int
    d: int
    seed: int
    functional: str = "weyl"
    slope: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        if self.slope is None:
            out.pop("slope")
        return out


@dataclass
class ExponentFit:
    slope: float
    intercept: float
    residual: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def _check_moment_range(bound: float, s: int) -> None:
    if bound > 0 and 2 * s * math.log(bound) >= MAX_LOG_MOMENT:
        raise InvalidParameterError(
            f"moment of order {2 * s} with values up to {bound:.3g} overflows float64"
        )


def _check_lattice_exact(d: int, N: int, s: int) -> None:
    if s * N ** d >= TORUS_DENOMINATOR:
        logger.warning(
            f"s*N^d = {s * N ** d} >= 2^31: lattice moments may pick up spurious solutions"
        )


def mc_moment(
    d: int,
    N: int,
    s: int,
    weights: Optional[WeightSequence] = None,
    samples: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> MomentEstimate:
    """Estimate ∫ |Σ a_n e(f(n))|^{2s} dx over T_d (a_n = 1 when no weights)."""
    params = SumParams(d, N)
    if s < 1:
        raise InvalidParameterError(f"moment half-order s must be >= 1, got {s}")
    if weights is not None and len(weights) != params.N:
        raise InvalidParameterError(f"{len(weights)} weights supplied for N={params.N}")
    bound = float(np.sum(np.abs(weights.values))) if weights is not None else float(params.N)
    _check_moment_range(bound, s)
    _check_lattice_exact(params.d, params.N, s)
    denominators = (TORUS_DENOMINATOR,) * params.d

    def functional(numerators: np.ndarray) -> np.ndarray:
        phases = lattice_phase_matrix(numerators, denominators, params.N)
        total = phases.sum(axis=1) if weights is None else phases @ weights.values
        return np.abs(total) ** (2 * s)

    mean, stderr = mc_integrate(functional, params.d, samples, seed, workers)
    name = "weyl" if weights is None else "weighted"
    return MomentEstimate(mean, stderr, samples, s, params.N, params.d, seed, functional=name)


def completed_moment(
    d: int,
    N: int,
    samples: int = 100_000,
    seed: int = 0,
    mode: CompletionMode = DEFAULT_MODE,
    s: Optional[int] = None,
    workers: int = 1,
) -> MomentEstimate:
    """Estimate ∫ W_d(x; N)^{2s} dx, by default with s = s(d)."""
    params = SumParams(d, N)
    mode = CompletionMode(mode)
    s = s_of(params.d) if s is None else s
    if s < 1:
        raise InvalidParameterError(f"moment half-order s must be >= 1, got {s}")
    _check_moment_range(params.N * weight_mass(params.N, mode), s)
    _check_lattice_exact(params.d, params.N, s)
    denominators = (TORUS_DENOMINATOR,) * params.d

    def functional(numerators: np.ndarray) -> np.ndarray:
        phases = lattice_phase_matrix(numerators, denominators, params.N)
        return completed_values(phases, mode) ** (2 * s)

    mean, stderr = mc_integrate(functional, params.d, samples, seed, workers)
    return MomentEstimate(
        mean, stderr, samples, s, params.N, params.d, seed, functional=f"completed:{mode.value}"
    )


def moment_exponent_fit(points: Sequence[Tuple[int, float]]) -> ExponentFit:
    """Least-squares slope of log(moment) against log N."""
    points = list(points)
    if len(points) < 3:
        raise InvalidParameterError(f"need at least 3 points for a fit, got {len(points)}")
    Ns = np.array([p[0] for p in points], dtype=np.float64)
    moments = np.array([p[1] for p in points], dtype=np.float64)
    if np.any(np.diff(Ns) <= 0):
        raise InvalidParameterError("N values must be strictly increasing")
    if np.any(moments <= 0):
        raise InvalidParameterError("moments must be positive to take logarithms")
    log_N, log_m = np.log(Ns), np.log(moments)
    fit = stats.linregress(log_N, log_m)
    residual = float(np.sqrt(np.mean((log_m - (fit.slope * log_N + fit.intercept)) ** 2)))
    return ExponentFit(float(fit.slope), float(fit.intercept), residual)


def moment_series(
    d: int,
    Ns: Sequence[int],
    s: int,
    samples: int,
    seed: int,
    completed: bool = False,
    mode: CompletionMode = DEFAULT_MODE,
    workers: int = 1,
) -> Tuple[List[MomentEstimate], ExponentFit]:
    """Moments along a list of N and the fitted growth exponent."""
    estimates = []
    for N in Ns:
        if completed:
            est = completed_moment(d, N, samples, seed, mode=mode, s=s, workers=workers)
        else:
            est = mc_moment(d, N, s, samples=samples, seed=seed, workers=workers)
        logger.info(f"N={N}: moment {est.mean:.6g} +- {est.stderr:.3g}")
        estimates.append(est)
    fit = moment_exponent_fit([(e.N, e.mean) for e in estimates])
    for est in estimates:
        est.slope = fit.slope
    return estimates, fit
