"""Bulk evaluation of sum functionals over rational grids of T_d.

The grid is cut into contiguous flat-index ranges (strips of the leading
coordinate in C order) whose size does not depend on the worker count, so
results come back in grid order and are identical for any number of threads.
"""

import logging
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence, Tuple, TypeVar

import numpy as np

from weylbounds.core.phase import PhasePoint, SumParams, lattice_phase_matrix
from weylbounds.errors import InvalidParameterError, ResourceCapError

logger = logging.getLogger(__name__)

DEFAULT_SWEEP_CAP = 10 ** 8
TARGET_BLOCK_ENTRIES = 2 ** 18

Reducer = Callable[[np.ndarray], np.ndarray]
T = TypeVar("T")
R = TypeVar("R")


def modulus_reducer(phases: np.ndarray) -> np.ndarray:
    """|S_d| for every row of a phase block."""
    return np.abs(phases.sum(axis=1))


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> Iterator[R]:
    """Map ``fn`` over ``items`` on a thread pool, yielding in input order."""
    if workers <= 1:
        for item in items:
            yield fn(item)
        return
    window = 4 * workers
    with ThreadPoolExecutor(max_workers=workers) as executor:
        pending = deque()
        for item in items:
            pending.append(executor.submit(fn, item))
            if len(pending) >= window:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


@dataclass(frozen=True)
class GridSpec:
    """Grid points m_j / res_j (corners) or (2 m_j + 1) / (2 res_j) (centers)."""

    d: int
    resolution: Tuple[int, ...]
    centered: bool = False

    def __post_init__(self):
        resolution = tuple(int(r) for r in self.resolution)
        if len(resolution) != self.d:
            raise InvalidParameterError(
                f"resolution has {len(resolution)} entries for degree {self.d}"
            )
        if any(r < 1 for r in resolution):
            raise InvalidParameterError(f"resolution entries must be >= 1, got {resolution}")
        object.__setattr__(self, "resolution", resolution)

    @property
    def size(self) -> int:
        return math.prod(self.resolution)

    @property
    def denominators(self) -> Tuple[int, ...]:
        return tuple(2 * r if self.centered else r for r in self.resolution)

    def numerators(self, flat: np.ndarray) -> np.ndarray:
        index = np.stack(np.unravel_index(flat, self.resolution), axis=1).astype(np.int64)
        return 2 * index + 1 if self.centered else index

    def point(self, index: Sequence[int]) -> PhasePoint:
        flat = np.ravel_multi_index(tuple(int(i) for i in index), self.resolution)
        num = self.numerators(np.array([flat], dtype=np.int64))[0]
        return PhasePoint(tuple(Fraction(int(a), q) for a, q in zip(num, self.denominators)))


def sweep_blocks(
    spec: GridSpec,
    N: int,
    reducer: Reducer = modulus_reducer,
    workers: int = 1,
    cap: int = DEFAULT_SWEEP_CAP,
    block_size: Optional[int] = None,
) -> Iterator[Tuple[int, np.ndarray]]:
    """Yield (first flat index, reduced values) blocks in grid order."""
    SumParams(spec.d, N)
    if spec.size > cap:
        raise ResourceCapError("grid sweep", spec.size, cap, hint=f"resolution {spec.resolution}")
    size = block_size or max(1, TARGET_BLOCK_ENTRIES // N)

    def evaluate(start: int) -> Tuple[int, np.ndarray]:
        flat = np.arange(start, min(start + size, spec.size), dtype=np.int64)
        phases = lattice_phase_matrix(spec.numerators(flat), spec.denominators, N)
        return start, np.asarray(reducer(phases), dtype=np.float64)

    logger.debug(f"Sweeping {spec.size} grid points in blocks of {size} with {workers} workers")
    yield from ordered_map(evaluate, range(0, spec.size, size), workers)


def grid_sweep(
    d: int,
    N: int,
    resolution: Sequence[int],
    reducer: Reducer = modulus_reducer,
    *,
    centered: bool = False,
    workers: int = 1,
    cap: int = DEFAULT_SWEEP_CAP,
) -> Iterator[Tuple[Tuple[int, ...], float]]:
    """Stream (grid index, value) pairs in grid order."""
    spec = GridSpec(d, tuple(resolution), centered)
    for start, values in sweep_blocks(spec, N, reducer, workers=workers, cap=cap):
        index = np.unravel_index(np.arange(start, start + values.size), spec.resolution)
        for offset, value in enumerate(values):
            yield tuple(int(axis[offset]) for axis in index), float(value)
