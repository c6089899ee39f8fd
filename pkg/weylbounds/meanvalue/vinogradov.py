"""Exact solution counts of the Vinogradov system.

J_{s,d}(N) counts (n_1, ..., n_2s) in [1, N]^{2s} with
Σ_{i<=s} n_i^j = Σ_{i>s} n_i^j for j = 1..d; it equals ∫ |S_d(x; N)|^{2s} dx.
Meet in the middle: tally the power-sum vector of every s-tuple, then
J = Σ count(key)^2.
"""

import itertools
import logging
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Dict, Tuple

import numpy as np

from weylbounds.core.phase import check_length
from weylbounds.errors import InvalidParameterError, ResourceCapError

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP = 10 ** 9
INT64_SAFE = 2 ** 62


@dataclass
class VinogradovCount:
    J: int
    s: int
    d: int
    N: int

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)


def _check_count(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise InvalidParameterError(f"{name} must be an integer >= 1, got {value!r}")
    return int(value)


def _validate(d: int, s: int, N: int, cap: int) -> Tuple[int, int, int]:
    d, s, N = _check_count("degree", d), _check_count("s", s), check_length(N)
    tuples = N ** (2 * s)
    if tuples > cap:
        raise ResourceCapError(
            "Vinogradov enumeration", tuples, cap, hint=f"N^(2s) = {N}^{2 * s}"
        )
    return d, s, N


def _key_counts(d: int, s: int, N: int) -> np.ndarray:
    if s * N ** d < INT64_SAFE:
        tuples = np.indices((N,) * s, dtype=np.int64).reshape(s, -1).T + 1
        keys = np.stack([(tuples ** j).sum(axis=1) for j in range(1, d + 1)], axis=1)
        _, counts = np.unique(keys, axis=0, return_counts=True)
        return counts.astype(np.int64)
    tally = Counter(
        tuple(sum(n ** j for n in combo) for j in range(1, d + 1))
        for combo in itertools.product(range(1, N + 1), repeat=s)
    )
    return np.fromiter(tally.values(), dtype=np.int64)


def vinogradov_count(
    d: int, s: int, N: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> VinogradovCount:
    d, s, N = _validate(d, s, N, cap)
    counts = _key_counts(d, s, N)
    J = sum(int(c) * int(c) for c in counts)
    logger.debug(f"J(d={d}, s={s}, N={N}) = {J} from {counts.size} distinct power-sum keys")
    return VinogradovCount(J=J, s=s, d=d, N=N)


def vinogradov_count_naive(
    d: int, s: int, N: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> VinogradovCount:
    """Brute-force oracle over all 2s-tuples."""
    d, s, N = _validate(d, s, N, cap)
    J = 0
    for combo in itertools.product(range(1, N + 1), repeat=2 * s):
        left, right = combo[:s], combo[s:]
        if all(sum(n ** j for n in left) == sum(n ** j for n in right) for j in range(1, d + 1)):
            J += 1
    return VinogradovCount(J=J, s=s, d=d, N=N)
