"""Polynomial phases e(x_1 n + ... + x_d n^d) on the torus T_d.

Points are stored as exact rationals reduced into [0, 1), so the phase of
any single term can be reduced mod 1 with integer arithmetic before the one
final rounding. Sequences of phases are produced by the finite-difference
recurrence e(f(n+1)) = e(f(n)) e(Δf(n)), run in short blocks that are
re-anchored from the exact difference table.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np

from weylbounds.errors import InvalidParameterError

logger = logging.getLogger(__name__)

MIN_DEGREE = 2
MAX_DEGREE = 12
RENORMALIZE_INTERVAL = 2 ** 10
# largest C(m, d) a block may reach before the drift of the top level shows
DRIFT_BINOMIAL_LIMIT = 2 ** 20
MAX_LATTICE_DENOMINATOR = 2 ** 31

Coordinate = Union[int, float, str, Fraction]


def check_degree(d) -> int:
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
        raise InvalidParameterError(f"degree must be an integer, got {d!r}")
    if not MIN_DEGREE <= d <= MAX_DEGREE:
        raise InvalidParameterError(
            f"degree d={d} outside the supported range {MIN_DEGREE}..{MAX_DEGREE}"
        )
    return int(d)


def check_length(N) -> int:
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)):
        raise InvalidParameterError(f"sum length must be an integer, got {N!r}")
    if N < 1:
        raise InvalidParameterError(f"sum length must be >= 1, got N={N}")
    return int(N)


def parse_coordinate(value: Coordinate) -> Fraction:
    """Convert a coordinate to an exact rational (floats convert exactly)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidParameterError(f"invalid coordinate {value!r}")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise InvalidParameterError(f"coordinate must be finite, got {value!r}")
        return Fraction(float(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise InvalidParameterError(f"cannot parse coordinate {value!r}") from e
    raise InvalidParameterError(f"unsupported coordinate type {type(value).__name__}")


@dataclass(frozen=True)
class SumParams:
    d: int
    N: int

    def __post_init__(self):
        object.__setattr__(self, "d", check_degree(self.d))
        object.__setattr__(self, "N", check_length(self.N))


@dataclass(frozen=True)
class PhasePoint:
    """A point of T_d, identified with the half-open cube [0, 1)^d."""

    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        coords = tuple(parse_coordinate(c) % 1 for c in self.coords)
        check_degree(len(coords))
        object.__setattr__(self, "coords", coords)

    @classmethod
    def parse(cls, text: str) -> "PhasePoint":
        """Parse ``"0.3,1/5"`` style input: decimals or fractions p/q."""
        parts = [part for part in text.split(",") if part.strip()]
        return cls(tuple(parts))

    @classmethod
    def zero(cls, d: int) -> "PhasePoint":
        return cls((0,) * check_degree(d))

    @property
    def d(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coords], dtype=np.float64)

    def shifted(self, offsets: Sequence[Coordinate]) -> "PhasePoint":
        if len(offsets) != self.d:
            raise InvalidParameterError(f"expected {self.d} offsets, got {len(offsets)}")
        return PhasePoint(tuple(c + parse_coordinate(o) for c, o in zip(self.coords, offsets)))

    def __neg__(self) -> "PhasePoint":
        return PhasePoint(tuple(-c for c in self.coords))

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coords)


def _unit(turns: float) -> complex:
    return cmath.exp(2j * math.pi * turns)


def _reduced_turns(parts: List[float]) -> float:
    return math.fsum(parts) % 1.0


def exact_turns(x: PhasePoint, n: int) -> float:
    """f(n) mod 1 for f(n) = x_1 n + ... + x_d n^d, reduced exactly."""
    parts = []
    for j, c in enumerate(x.coords, start=1):
        p, q = c.numerator, c.denominator
        if p:
            parts.append(((p * pow(n, j, q)) % q) / q)
    return _reduced_turns(parts)


def eval_phase(x: PhasePoint, n: int) -> complex:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidParameterError(f"phase index must be an integer >= 1, got {n!r}")
    return _unit(exact_turns(x, int(n)))


@lru_cache(maxsize=8192)
def power_difference(j: int, k: int, n0: int) -> int:
    """Δ^k applied to n -> n^j, evaluated at n0 (an exact integer)."""
    if k > j:
        return 0
    return sum((-1) ** (k - i) * math.comb(k, i) * (n0 + i) ** j for i in range(k + 1))


def difference_turns(x: PhasePoint, n0: int) -> List[float]:
    """Δ^k f(n0) mod 1 for k = 0..d, exact up to the final rounding."""
    table = []
    for k in range(x.d + 1):
        parts = []
        for j, c in enumerate(x.coords, start=1):
            p, q = c.numerator, c.denominator
            coeff = power_difference(j, k, n0) % q
            if p and coeff:
                parts.append(((p * coeff) % q) / q)
        table.append(_reduced_turns(parts))
    return table


def block_length(d: int) -> int:
    m = RENORMALIZE_INTERVAL
    while m > 1 and math.comb(m, d) > DRIFT_BINOMIAL_LIMIT:
        m //= 2
    return m


def _advance_block(anchors: np.ndarray, length: int) -> np.ndarray:
    # anchors[:, k] = e(Δ^k f(n0)); each level is the running product of the one above
    level = np.repeat(anchors[:, -1:], length, axis=1)
    for k in range(anchors.shape[1] - 2, -1, -1):
        lower = np.empty_like(level)
        lower[:, 0] = anchors[:, k]
        if length > 1:
            lower[:, 1:] = anchors[:, k : k + 1] * np.cumprod(level[:, :-1], axis=1)
        level = lower
    return level


def _blocked_phases(
    anchor_fn: Callable[[int], np.ndarray], batch: int, d: int, N: int
) -> np.ndarray:
    out = np.empty((batch, N), dtype=np.complex128)
    m = block_length(d)
    for start in range(0, N, m):
        length = min(m, N - start)
        out[:, start : start + length] = _advance_block(anchor_fn(start + 1), length)
    return out


def phase_sequence(x: PhasePoint, N: int) -> np.ndarray:
    """Return (e(f(1)), ..., e(f(N))) computed by the difference recurrence."""
    params = SumParams(x.d, N)

    def anchors(n0: int) -> np.ndarray:
        return np.exp(2j * np.pi * np.asarray(difference_turns(x, n0)))[None, :]

    return _blocked_phases(anchors, 1, params.d, params.N)[0]


def phase_matrix(points: Sequence[PhasePoint], N: int) -> np.ndarray:
    """Phase sequences of many arbitrary points, one row per point."""
    points = list(points)
    if not points:
        raise InvalidParameterError("phase_matrix needs at least one point")
    d = points[0].d
    if any(p.d != d for p in points):
        raise InvalidParameterError("all points must have the same degree")
    params = SumParams(d, N)

    def anchors(n0: int) -> np.ndarray:
        turns = np.array([difference_turns(p, n0) for p in points])
        return np.exp(2j * np.pi * turns)

    return _blocked_phases(anchors, len(points), params.d, params.N)


def lattice_phase_matrix(
    numerators: np.ndarray, denominators: Sequence[int], N: int
) -> np.ndarray:
    """Phase sequences of lattice points x_j = numerators[:, j] / denominators[j].

    Anchors are reduced with int64 modular arithmetic, which is exact while
    every denominator stays at or below 2^31.
    """
    num = np.asarray(numerators, dtype=np.int64)
    den = tuple(int(q) for q in denominators)
    if num.ndim != 2 or num.shape[1] != len(den):
        raise InvalidParameterError(
            f"numerators of shape {num.shape} do not match {len(den)} denominators"
        )
    if any(not 1 <= q <= MAX_LATTICE_DENOMINATOR for q in den):
        raise InvalidParameterError(
            f"lattice denominators must lie in 1..2^31, got {den}"
        )
    if num.size and (num.min() < 0 or np.any(num >= np.asarray(den))):
        raise InvalidParameterError("lattice numerators must lie in [0, denominator)")
    params = SumParams(len(den), N)
    batch = num.shape[0]

    def anchors(n0: int) -> np.ndarray:
        turns = np.zeros((batch, params.d + 1))
        for k in range(params.d + 1):
            acc = np.zeros(batch)
            for j, q in enumerate(den, start=1):
                coeff = power_difference(j, k, n0) % q
                if coeff:
                    acc += ((num[:, j - 1] * coeff) % q) / q
            turns[:, k] = acc % 1.0
        return np.exp(2j * np.pi * turns)

    return _blocked_phases(anchors, batch, params.d, params.N)


def lattice_points(numerators: np.ndarray, denominators: Sequence[int]) -> List[PhasePoint]:
    return [
        PhasePoint(tuple(Fraction(int(a), int(q)) for a, q in zip(row, denominators)))
        for row in np.asarray(numerators)
    ]
