"""Box covers of the superlevel sets {x : W_d(x; N) >= N^α}.

T_d is cut into U = Π_j ⌈N^{j+1+ε-α}⌉ boxes. Whether a box meets the
superlevel set is bracketed by testing its center against N^α (a lower
count) and N^α / 2 (an upper count, valid once the stability of W_d on
boxes of side N^{α-j-1-ε} holds). All counts are finite-N proxies for the
limsup sets and carry no claim about their true covers.
"""

import itertools
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp
from tqdm import tqdm

from weylbounds.completion import CompletionMode, completed_reducer, completed_sum, completed_values
from weylbounds.core.phase import PhasePoint, check_degree, lattice_phase_matrix, lattice_points, phase_matrix
from weylbounds.core.sweep import GridSpec, sweep_blocks
from weylbounds.errors import InvalidParameterError, ResourceCapError
from weylbounds.meanvalue.moments import moment_exponent_fit, s_of
from weylbounds.meanvalue.sampling import TORUS_DENOMINATOR, block_generator

logger = logging.getLogger(__name__)

DEFAULT_GRID_CAP = 10 ** 8
DEFAULT_MODE = CompletionMode.LITERAL
PROBE_BATCH = 256
# Philox block offset for base draws, disjoint from the probe streams
BASE_STREAM_OFFSET = 2 ** 32
COVERING_COLUMNS = ("i", "N", "U", "counted_lower", "counted_upper", "bound_exponent", "elapsed_ms")


class BoxCriterion(str, Enum):
    CENTER_GE_ALPHA = "center_ge_alpha"
    CENTER_GE_HALF_ALPHA = "center_ge_half_alpha"


def _rational(value) -> sp.Rational:
    if isinstance(value, float):
        return sp.Rational(str(value))
    if isinstance(value, Fraction):
        return sp.Rational(value.numerator, value.denominator)
    return sp.Rational(value)


def _check_box_params(N: int, alpha: float, eps: float) -> None:
    if not 0 < alpha < 1:
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha}")
    if eps < 0:
        raise InvalidParameterError(f"eps must be nonnegative, got {eps}")
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)) or N < 2:
        raise InvalidParameterError(f"N must be an integer >= 2, got {N!r}")


@dataclass(frozen=True)
class BoxSpec:
    d: int
    N: int
    alpha: float
    eps: float
    reciprocals: Tuple[int, ...]

    @property
    def zetas(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(1, q) for q in self.reciprocals)

    @property
    def U(self) -> int:
        return math.prod(self.reciprocals)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "N": self.N,
            "alpha": self.alpha,
            "eps": self.eps,
            "reciprocals": list(self.reciprocals),
            "zetas": [float(z) for z in self.zetas],
            "U": self.U,
        }


def box_side_lengths(d: int, N: int, alpha: float, eps: float) -> BoxSpec:
    """ζ_j = 1/⌈N^{j+1+ε-α}⌉, with the ceiling taken exactly."""
    check_degree(d)
    _check_box_params(N, alpha, eps)
    a, e = _rational(alpha), _rational(eps)
    reciprocals = tuple(
        int(sp.ceiling(sp.Integer(N) ** (j + 1 + e - a))) for j in range(1, d + 1)
    )
    return BoxSpec(d=d, N=int(N), alpha=float(alpha), eps=float(eps), reciprocals=reciprocals)


def dyadic_schedule(i_min: int, i_max: int) -> List[int]:
    if not 1 <= i_min <= i_max:
        raise InvalidParameterError(f"need 1 <= i_min <= i_max, got ({i_min}, {i_max})")
    return [2 ** i for i in range(i_min, i_max + 1)]


@dataclass
class BoxGrid:
    spec: BoxSpec
    U: int
    counted_lower: int
    counted_upper: int
    mode: CompletionMode
    criterion: BoxCriterion = BoxCriterion.CENTER_GE_HALF_ALPHA
    elapsed_ms: float = 0.0

    @property
    def counted(self) -> int:
        if self.criterion is BoxCriterion.CENTER_GE_ALPHA:
            return self.counted_lower
        return self.counted_upper

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "U": self.U,
            "counted": self.counted,
            "counted_lower": self.counted_lower,
            "counted_upper": self.counted_upper,
            "criterion": self.criterion.value,
            "mode": self.mode.value,
            "proxy": "finite-N superlevel boxes for the limsup set E_{d,alpha+eta}",
        }


def count_superlevel_boxes(
    d: int,
    N: int,
    alpha: float,
    eps: float,
    mode: CompletionMode = DEFAULT_MODE,
    criterion: BoxCriterion = BoxCriterion.CENTER_GE_HALF_ALPHA,
    workers: int = 1,
    cap: int = DEFAULT_GRID_CAP,
) -> BoxGrid:
    """Count boxes whose center has W_d >= N^α (lower) and >= N^α/2 (upper)."""
    spec = box_side_lengths(d, N, alpha, eps)
    mode, criterion = CompletionMode(mode), BoxCriterion(criterion)
    if spec.U > cap:
        raise ResourceCapError("box grid", spec.U, cap, hint=f"1/zeta = {spec.reciprocals}")
    grid = GridSpec(d, spec.reciprocals, centered=True)
    threshold = float(N) ** alpha
    lower = upper = 0
    started = time.perf_counter()
    for _, values in sweep_blocks(grid, N, completed_reducer(mode), workers=workers, cap=cap):
        lower += int(np.count_nonzero(values >= threshold))
        upper += int(np.count_nonzero(values >= threshold / 2))
    elapsed_ms = (time.perf_counter() - started) * 1000
    logger.debug(f"N={N}: U={spec.U}, counted {lower}..{upper} in {elapsed_ms:.0f} ms")
    return BoxGrid(spec, spec.U, lower, upper, mode, criterion, elapsed_ms)


@dataclass
class BoxBound:
    U: int
    count_bound: float
    count_exponent: float
    exponent: float
    has_o1: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def theoretical_box_bound(d: int, N: int, alpha: float, eps: float) -> BoxBound:
    """#boxes <= U N^{s(d)(1-2α)+o(1)} <= N^{2s(d)(1-α)+d(1-α)+dε+o(1)}."""
    spec = box_side_lengths(d, N, alpha, eps)
    s = s_of(d)
    return BoxBound(
        U=spec.U,
        count_bound=spec.U * float(N) ** (s * (1 - 2 * alpha)),
        count_exponent=s + d * (1 + eps - alpha) + s * (1 - 2 * alpha),
        exponent=2 * s * (1 - alpha) + d * (1 - alpha) + d * eps,
    )


def exponent_identity_residual(d: int, alpha: float, eps: float) -> float:
    s = s_of(d)
    lhs = s + d * (1 + eps - alpha) + s * (1 - 2 * alpha)
    rhs = 2 * s * (1 - alpha) + d * (1 - alpha) + d * eps
    return lhs - rhs


def exponent_identity_symbolic() -> sp.Expr:
    """The exponent identity as a sympy expression; simplifies to 0."""
    d, alpha, eps = sp.symbols("d alpha epsilon", positive=True)
    s = d * (d + 1) / 2
    lhs = s + d * (1 + eps - alpha) + s * (1 - 2 * alpha)
    rhs = 2 * s * (1 - alpha) + d * (1 - alpha) + d * eps
    return sp.simplify(lhs - rhs)


def covering_sweep(
    d: int,
    alpha: float,
    eps: float,
    i_min: int,
    i_max: int,
    mode: CompletionMode = DEFAULT_MODE,
    workers: int = 1,
    cap: int = DEFAULT_GRID_CAP,
) -> List[Dict[str, Any]]:
    """One CSV-ready row per dyadic N = 2^i."""
    rows = []
    for i, N in zip(itertools.count(i_min), tqdm(dyadic_schedule(i_min, i_max), desc="dyadic N", disable=None)):
        grid = count_superlevel_boxes(d, N, alpha, eps, mode, workers=workers, cap=cap)
        bound = theoretical_box_bound(d, N, alpha, eps)
        rows.append(
            {
                "i": i,
                "N": N,
                "U": grid.U,
                "counted_lower": grid.counted_lower,
                "counted_upper": grid.counted_upper,
                "bound_exponent": bound.exponent,
                "elapsed_ms": grid.elapsed_ms,
            }
        )
        logger.info(f"i={i} N={N}: U={grid.U} counted {grid.counted_lower}..{grid.counted_upper}")
    return rows


def fit_count_exponent(rows: Sequence[Dict[str, Any]]) -> Dict[str, Any]:
    """Slope of log(counted_upper) against log N, next to log U and the bound."""
    usable = [r for r in rows if r["counted_upper"] > 0]
    fit = moment_exponent_fit([(r["N"], r["counted_upper"]) for r in usable])
    grid_fit = moment_exponent_fit([(r["N"], r["U"]) for r in usable])
    bound = usable[-1]["bound_exponent"]
    return {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "residual": fit.residual,
        "log_U_slope": grid_fit.slope,
        "bound_exponent": bound,
        "exceeds_bound": fit.slope > bound,
    }


def stability_half_lengths(d: int, N: int, alpha: float, eps: float) -> Tuple[float, ...]:
    """ζ_j = N^{α-j-1-ε}: half side lengths of the stability rectangle."""
    return tuple(float(N) ** (alpha - j - 1 - eps) for j in range(1, d + 1))


@dataclass
class StabilityReport:
    base: str
    d: int
    N: int
    alpha: float
    eps: float
    mode: CompletionMode
    half_lengths: Tuple[float, ...]
    base_value: float
    threshold: float
    probes: int
    violations: int
    vacuous: bool
    min_probe_value: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["mode"] = self.mode.value
        out["half_lengths"] = list(self.half_lengths)
        return out


def _probe_points(x: PhasePoint, half: Sequence[float], probes: int, rng: np.random.Generator) -> List[PhasePoint]:
    zetas = [Fraction(z) for z in half]
    corners = [
        x.shifted([sign * z for sign, z in zip(signs, zetas)])
        for signs in itertools.product((-1, 1), repeat=x.d)
    ]
    extra = max(0, probes - len(corners))
    offsets = (2 * rng.random((extra, x.d)) - 1) * np.asarray(half)
    return corners + [x.shifted([float(o) for o in row]) for row in offsets]


def stability_check(
    x: PhasePoint,
    N: int,
    alpha: float,
    eps: float,
    probes: int,
    seed: int,
    mode: CompletionMode = DEFAULT_MODE,
    stream: int = 0,
) -> StabilityReport:
    """Count probes y in R(x, ζ) with W_d(y; N) < N^α/2 while W_d(x; N) >= N^α."""
    _check_box_params(N, alpha, eps)
    if probes < 1:
        raise InvalidParameterError(f"need at least one probe, got {probes}")
    mode = CompletionMode(mode)
    half = stability_half_lengths(x.d, N, alpha, eps)
    threshold = float(N) ** alpha
    base_value = completed_sum(x, N, mode).value
    report = StabilityReport(
        base=str(x), d=x.d, N=N, alpha=alpha, eps=eps, mode=mode, half_lengths=half,
        base_value=base_value, threshold=threshold, probes=0, violations=0, vacuous=True,
    )
    if base_value < threshold:
        logger.debug(f"base {x} has W={base_value:.4g} < N^alpha={threshold:.4g}; vacuous")
        return report
    points = _probe_points(x, half, probes, block_generator(seed, stream))
    values = np.concatenate(
        [
            completed_values(phase_matrix(points[i : i + PROBE_BATCH], N), mode)
            for i in range(0, len(points), PROBE_BATCH)
        ]
    )
    report.vacuous = False
    report.probes = len(points)
    report.violations = int(np.count_nonzero(values < threshold / 2))
    report.min_probe_value = float(values.min())
    return report


def random_bases(
    d: int,
    N: int,
    alpha: float,
    count: int,
    seed: int,
    mode: CompletionMode = DEFAULT_MODE,
    max_draws: int = 100_000,
) -> List[PhasePoint]:
    """Random lattice points of T_d satisfying W_d(x; N) >= N^α."""
    threshold = float(N) ** alpha
    denominators = (TORUS_DENOMINATOR,) * d
    found: List[PhasePoint] = []
    batch, drawn = 0, 0
    while len(found) < count and drawn < max_draws:
        numerators = block_generator(seed, BASE_STREAM_OFFSET + batch).integers(
            0, TORUS_DENOMINATOR, size=(PROBE_BATCH, d), dtype=np.int64
        )
        values = completed_values(lattice_phase_matrix(numerators, denominators, N), mode)
        found.extend(lattice_points(numerators[values >= threshold], denominators))
        batch += 1
        drawn += PROBE_BATCH
    if len(found) < count:
        logger.warning(f"only {len(found)} of {count} bases reach N^alpha after {drawn} draws")
    return found[:count]


@dataclass
class StabilitySweep:
    reports: List[StabilityReport] = field(default_factory=list)
    smallest_clean_N: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "smallest_clean_N": self.smallest_clean_N,
            "reports": [r.to_dict() for r in self.reports],
        }


def stability_sweep(
    bases: Sequence[PhasePoint],
    alpha: float,
    eps: float,
    i_min: int,
    i_max: int,
    probes: int,
    seed: int,
    mode: CompletionMode = DEFAULT_MODE,
) -> StabilitySweep:
    """Run stability_check along N = 2^i and locate where violations stop.

    An N where every base is vacuous carries no evidence, so it neither
    starts nor extends a clean run.
    """
    sweep = StabilitySweep()
    clean_from: Optional[int] = None
    for i, N in zip(itertools.count(i_min), dyadic_schedule(i_min, i_max)):
        reports = [
            stability_check(x, N, alpha, eps, probes, seed, mode, stream=i * len(bases) + b)
            for b, x in enumerate(bases)
        ]
        sweep.reports.extend(reports)
        violated = sum(r.violations for r in reports)
        if violated:
            clean_from = None
            logger.info(f"N={N}: {violated} stability violations (reported, not failed)")
        elif all(r.vacuous for r in reports):
            clean_from = None
            logger.info(f"N={N}: no base reaches N^alpha, no evidence")
        elif clean_from is None:
            clean_from = N
    sweep.smallest_clean_N = clean_from
    return sweep
