"""Weyl sums S_d(x; N) and their weighted variants."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from weylbounds.core.phase import PhasePoint, SumParams, eval_phase, phase_sequence
from weylbounds.errors import InvalidParameterError


@dataclass(eq=False)
class WeightSequence:
    """Complex weights a_1, ..., a_N."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim != 1 or values.size == 0:
            raise InvalidParameterError("weights must be a non-empty vector")
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("weights must be finite")
        self.values = values

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def l2_mass(self) -> float:
        """Σ |a_n|^2."""
        return float(np.sum(np.abs(self.values) ** 2))

    @classmethod
    def unit(cls, N: int) -> "WeightSequence":
        return cls(np.ones(N, dtype=np.complex128))

    @classmethod
    def twisted(cls, h: int, N: int) -> "WeightSequence":
        """a_n = e(hn/N), with hn reduced mod N exactly."""
        n = np.arange(1, N + 1, dtype=np.int64)
        return cls(np.exp(2j * np.pi * ((h * n) % N) / N))

    @classmethod
    def random_unimodular(cls, N: int, seed: int) -> "WeightSequence":
        rng = np.random.Generator(np.random.Philox(key=seed))
        return cls(np.exp(2j * np.pi * rng.random(N)))


def weyl_sum_direct(x: PhasePoint, N: int) -> complex:
    """S_d(x; N) term by term from exactly reduced phases."""
    params = SumParams(x.d, N)
    terms = [eval_phase(x, n) for n in range(1, params.N + 1)]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def weyl_sum_fast(x: PhasePoint, N: int) -> complex:
    return complex(phase_sequence(x, N).sum())


def weyl_sum_weighted(a: WeightSequence, x: PhasePoint, N: Optional[int] = None) -> complex:
    N = len(a) if N is None else N
    if len(a) != N:
        raise InvalidParameterError(f"{len(a)} weights supplied for a sum of length {N}")
    return complex(np.dot(a.values, phase_sequence(x, N)))
