"""Completed sums W_d(x; N) = Σ_h w(h) |Σ_n e(hn/N) e(f(n))|.

The inner sums for h = 1..N are the magnitudes of an (unnormalized) inverse
DFT of the phase sequence, frequency N aliasing to 0.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict

import numpy as np
from scipy import fft

from weylbounds.core.phase import PhasePoint, SumParams, eval_phase, phase_sequence
from weylbounds.core.sweep import Reducer

logger = logging.getLogger(__name__)

DIRECT_TRANSFORM_LIMIT = 2048


class CompletionMode(str, Enum):
    LITERAL = "literal"
    SYMMETRIZED = "symmetrized"


DEFAULT_MODE = CompletionMode.SYMMETRIZED


def completion_weights(N: int, mode: CompletionMode = DEFAULT_MODE) -> np.ndarray:
    """Weights for h = 1..N: 1/h (literal) or 1/min(h, N+1-h) (symmetrized)."""
    h = np.arange(1, N + 1, dtype=np.float64)
    if CompletionMode(mode) is CompletionMode.LITERAL:
        return 1.0 / h
    return 1.0 / np.minimum(h, N + 1 - h)


def weight_mass(N: int, mode: CompletionMode = DEFAULT_MODE) -> float:
    return math.fsum(completion_weights(N, mode))


def _is_power_of_two(n: int) -> bool:
    return n & (n - 1) == 0


def twisted_transform(phases: np.ndarray) -> np.ndarray:
    """Σ_{m=0}^{N-1} g_m e(km/N) for k = 0..N-1 along the last axis."""
    N = phases.shape[-1]
    if _is_power_of_two(N) or N >= DIRECT_TRANSFORM_LIMIT:
        return fft.ifft(phases, axis=-1, norm="forward")
    k = np.arange(N, dtype=np.int64)
    kernel = np.exp(2j * np.pi * (np.outer(k, k) % N) / N)
    return phases @ kernel.T


def spectrum_norms(phases: np.ndarray) -> np.ndarray:
    """|Σ_{n=1}^N e(hn/N) g(n)| for h = 1..N along the last axis."""
    # the n = m+1 shift only multiplies by e(h/N), which the modulus drops
    return np.abs(np.roll(twisted_transform(phases), -1, axis=-1))


def completed_values(phases: np.ndarray, mode: CompletionMode = DEFAULT_MODE) -> np.ndarray:
    return spectrum_norms(phases) @ completion_weights(phases.shape[-1], mode)


def completed_reducer(mode: CompletionMode = DEFAULT_MODE) -> Reducer:
    mode = CompletionMode(mode)

    def reducer(phases: np.ndarray) -> np.ndarray:
        return completed_values(phases, mode)

    return reducer


@dataclass
class CompletionReport:
    value: float
    mode: CompletionMode
    spectrum_norms: np.ndarray
    N: int
    d: int

    def to_dict(self, include_spectrum: bool = False) -> Dict[str, Any]:
        out = {"N": self.N, "d": self.d, "mode": self.mode.value, "value": self.value}
        if include_spectrum:
            out["spectrum_norms"] = [float(v) for v in self.spectrum_norms]
        return out


@dataclass
class DominationReport:
    ratio: float
    argmax_M: int
    W: float
    N: int
    d: int
    mode: CompletionMode

    def to_dict(self) -> Dict[str, Any]:
        return {
            "N": self.N,
            "d": self.d,
            "mode": self.mode.value,
            "ratio": self.ratio,
            "argmax_M": self.argmax_M,
            "W": self.W,
        }


def inner_spectrum(x: PhasePoint, N: int) -> np.ndarray:
    return spectrum_norms(phase_sequence(x, N))


def inner_spectrum_direct(x: PhasePoint, N: int) -> np.ndarray:
    """Double-loop oracle for inner_spectrum."""
    params = SumParams(x.d, N)
    n = np.arange(1, params.N + 1, dtype=np.int64)
    g = np.array([eval_phase(x, int(m)) for m in n])
    norms = np.empty(params.N)
    for h in range(1, params.N + 1):
        twist = np.exp(2j * np.pi * ((h * n) % params.N) / params.N)
        norms[h - 1] = abs(np.sum(twist * g))
    return norms


def completed_sum(
    x: PhasePoint, N: int, mode: CompletionMode = DEFAULT_MODE
) -> CompletionReport:
    mode = CompletionMode(mode)
    norms = inner_spectrum(x, N)
    value = float(norms @ completion_weights(N, mode))
    return CompletionReport(value=value, mode=mode, spectrum_norms=norms, N=N, d=x.d)


def completed_sum_direct(x: PhasePoint, N: int, mode: CompletionMode = DEFAULT_MODE) -> float:
    return math.fsum(inner_spectrum_direct(x, N) * completion_weights(N, CompletionMode(mode)))


def domination_check(
    x: PhasePoint, N: int, mode: CompletionMode = DEFAULT_MODE
) -> DominationReport:
    """max_{M <= N} |S_d(x; M)| / W_d(x; N) and the first M attaining it."""
    mode = CompletionMode(mode)
    phases = phase_sequence(x, N)
    partial = np.abs(np.cumsum(phases))
    W = float(spectrum_norms(phases) @ completion_weights(N, mode))
    best = int(np.argmax(partial))
    ratio = float(partial[best] / W) if W > 0 else math.inf
    logger.debug(f"domination ratio {ratio:.4g} at M={best + 1} (W={W:.6g}, mode={mode.value})")
    return DominationReport(ratio=ratio, argmax_M=best + 1, W=W, N=N, d=x.d, mode=mode)
