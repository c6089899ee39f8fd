"""Closed-form dimension bounds for the large-value sets of Weyl sums.

u(d, α) = min_{k=0..d-1} ((2d^2 + 4d)(1 - α) + k(k+1)) / (4 - 2α + 2k)

is the smallest t for which the singular-value covering sums over the
dyadic box families converge, with ε sent to 0.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Sequence, Union

import numpy as np
import sympy as sp

from weylbounds.errors import InvalidParameterError
from weylbounds.meanvalue.moments import s_of

logger = logging.getLogger(__name__)

Real = Union[float, Fraction, sp.Rational]


def _check_alpha(alpha) -> None:
    if not 0 < alpha < 1:
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha}")


def _check_k(d: int, k: int) -> None:
    if not 0 <= k <= d - 1:
        raise InvalidParameterError(f"k must lie in 0..{d - 1}, got {k}")


def _check_d(d: int) -> None:
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or d < 2:
        raise InvalidParameterError(f"degree must be an integer >= 2, got {d!r}")


def s_k(k: int) -> int:
    """s(k) = k(k+1)/2, with s(0) = 0."""
    return k * (k + 1) // 2


@dataclass(frozen=True)
class RectangleSides:
    r: tuple

    def __post_init__(self):
        r = tuple(float(v) for v in self.r)
        if not r or any(v <= 0 for v in r):
            raise InvalidParameterError(f"side lengths must be positive, got {r}")
        if any(a < b for a, b in zip(r, r[1:])):
            raise InvalidParameterError(f"side lengths must be sorted nonincreasing, got {r}")
        object.__setattr__(self, "r", r)

    @property
    def d(self) -> int:
        return len(self.r)


def singular_value_phi(rect: RectangleSides, k: int, t: float) -> float:
    """φ_{k,t}(R) = r_1 ... r_k r_{k+1}^{t-k}."""
    _check_k(rect.d, k)
    if not 0 < t <= rect.d:
        raise InvalidParameterError(f"t must lie in (0, {rect.d}], got {t}")
    return math.prod(rect.r[:k]) * rect.r[k] ** (t - k)


def ball_cover_count(rect: RectangleSides, k: int) -> float:
    """(r_1 / r_{k+1}) ... (r_k / r_{k+1}): balls of radius r_{k+1} covering R."""
    _check_k(rect.d, k)
    return math.prod(r / rect.r[k] for r in rect.r[:k])


def covering_sum_exponent(d: int, alpha: float, eps: float, k: int, t: float) -> float:
    """N-exponent of Σ_{R in the i-th box family} φ_{k,t}(R), o(1) dropped."""
    _check_d(d)
    _check_k(d, k)
    s = s_of(d)
    return (
        2 * s * (1 - alpha)
        + d * (1 - alpha)
        + d * eps
        + (t - k) * (alpha - k - 2 - eps)
        + k * (alpha - 1 - eps)
        - s_k(k)
    )


def critical_t(d: int, alpha: float, k: int, eps: float = 0.0) -> float:
    """Threshold t_k above which the covering exponent is negative."""
    _check_d(d)
    _check_alpha(alpha)
    _check_k(d, k)
    if eps == 0:
        # (d^2 + 2d)(1 - α) = 2s(d)(1 - α) + d(1 - α)
        return ((d * d + 2 * d) * (1 - alpha) + s_k(k)) / (k + 2 - alpha)
    base = (d * d + 2 * d) * (1 - alpha) + d * eps + k * (alpha - 1 - eps) - s_k(k)
    return k + base / (k + 2 + eps - alpha)


def _closed_form_term(d: int, alpha: float, k: int) -> float:
    return ((2 * d * d + 4 * d) * (1 - alpha) + k * (k + 1)) / (4 - 2 * alpha + 2 * k)


def dim_bound_simplified(d: int, alpha: float, variant: str) -> float:
    _check_d(d)
    _check_alpha(alpha)
    if variant == "k0":
        return (2 * d * d + 4 * d) * (1 - alpha) / (4 - 2 * alpha)
    if variant == "kd1":
        return d - d * (d + 1) * (2 * alpha - 1) / (2 * (d + 1 - alpha))
    raise InvalidParameterError(f"unknown simplified bound {variant!r}; use 'k0' or 'kd1'")


@dataclass
class DimBoundReport:
    d: int
    alpha: float
    per_k: List[float]
    u: float
    argmin_k: int
    bound_k0: float
    bound_kd1: float
    u_closed_form: float = field(default=math.nan)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def dim_upper_bound(d: int, alpha: float) -> DimBoundReport:
    """u(d, α) via min_k critical_t, cross-checked against the closed form."""
    _check_d(d)
    _check_alpha(alpha)
    per_k = [critical_t(d, alpha, k) for k in range(d)]
    argmin_k = int(np.argmin(per_k))
    closed = min(_closed_form_term(d, alpha, k) for k in range(d))
    if not math.isclose(closed, per_k[argmin_k], rel_tol=1e-12, abs_tol=1e-12):
        logger.warning(f"closed form {closed!r} disagrees with thresholds {per_k[argmin_k]!r}")
    return DimBoundReport(
        d=d,
        alpha=alpha,
        per_k=per_k,
        u=per_k[argmin_k],
        argmin_k=argmin_k,
        bound_k0=dim_bound_simplified(d, alpha, "k0"),
        bound_kd1=dim_bound_simplified(d, alpha, "kd1"),
        u_closed_form=closed,
    )


def dim_upper_bound_exact(d: int, alpha: Real) -> sp.Rational:
    """u(d, α) as an exact rational for rational α."""
    _check_d(d)
    a = sp.Rational(str(alpha)) if isinstance(alpha, float) else sp.Rational(alpha)
    _check_alpha(a)
    terms = [((2 * d * d + 4 * d) * (1 - a) + k * (k + 1)) / (4 - 2 * a + 2 * k) for k in range(d)]
    return sp.Min(*terms)


def asymptotic_rate(d: int, alpha: float) -> float:
    """(1 - α)^{-1} u(d, α); tends to d^2 + 2d as α -> 1."""
    return dim_upper_bound(d, alpha).u / (1 - alpha)


@dataclass(frozen=True)
class AsymptoticConstants:
    d: int
    c1: sp.Rational
    c2: int

    def to_dict(self) -> Dict[str, Any]:
        return {"d": self.d, "c1": float(self.c1), "c2": self.c2}


def asymptotic_constants(d: int) -> AsymptoticConstants:
    """c1(d) and c2(d) bracketing (1 - α)^{-1} dim E_{d,α} as α -> 1."""
    _check_d(d)
    if d == 2:
        c1 = sp.Rational(3)
    else:
        c1 = max(min(sp.Rational(1, nu), sp.Rational(2, 2 * d - nu)) for nu in range(1, d + 1))
    return AsymptoticConstants(d=d, c1=c1, c2=d * d + 2 * d)


TABLE_COLUMNS = ("d", "alpha", "k_min", "u", "bound_k0", "bound_kd1", "c1", "c2")


def dimension_table(ds: Sequence[int], alphas: Sequence[float]) -> List[Dict[str, Any]]:
    rows = []
    for d in ds:
        constants = asymptotic_constants(d)
        for alpha in alphas:
            report = dim_upper_bound(d, alpha)
            rows.append(
                {
                    "d": d,
                    "alpha": alpha,
                    "k_min": report.argmin_k,
                    "u": report.u,
                    "bound_k0": report.bound_k0,
                    "bound_kd1": report.bound_kd1,
                    "c1": float(constants.c1),
                    "c2": constants.c2,
                }
            )
    return rows
