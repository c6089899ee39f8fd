from fractions import Fraction

import numpy as np
import pytest

from weylbounds.core.phase import PhasePoint
from weylbounds.core.sums import weyl_sum_direct
from weylbounds.core.sweep import GridSpec, grid_sweep, modulus_reducer, ordered_map, sweep_blocks
from weylbounds.errors import InvalidParameterError, ResourceCapError


@pytest.mark.parametrize("workers", [1, 3, 8])
def test_ordered_map_keeps_input_order(workers):
    assert list(ordered_map(lambda i: i * i, range(50), workers)) == [i * i for i in range(50)]


def test_grid_points():
    assert GridSpec(2, (4, 8)).point((1, 3)) == PhasePoint((Fraction(1, 4), Fraction(3, 8)))
    assert GridSpec(2, (4, 8), centered=True).point((1, 3)) == PhasePoint((Fraction(3, 8), Fraction(7, 16)))
    assert GridSpec(3, (2, 3, 5)).size == 30


def test_grid_validation():
    with pytest.raises(InvalidParameterError):
        GridSpec(2, (4,))
    with pytest.raises(InvalidParameterError):
        GridSpec(2, (4, 0))


@pytest.mark.parametrize("centered", [False, True])
def test_sweep_matches_direct_sums(centered):
    spec = GridSpec(2, (3, 5), centered)
    values = dict(grid_sweep(2, 20, (3, 5), centered=centered))
    assert len(values) == 15
    for index, value in values.items():
        assert value == pytest.approx(abs(weyl_sum_direct(spec.point(index), 20)), abs=1e-9)


def test_sweep_is_independent_of_worker_count():
    spec = GridSpec(3, (6, 5, 7))
    single = np.concatenate([v for _, v in sweep_blocks(spec, 50, modulus_reducer, workers=1, block_size=13)])
    pooled = np.concatenate([v for _, v in sweep_blocks(spec, 50, modulus_reducer, workers=4, block_size=13)])
    assert single.size == spec.size
    assert np.array_equal(single, pooled)


def test_sweep_cap():
    with pytest.raises(ResourceCapError) as info:
        list(grid_sweep(2, 10, (100, 100), cap=1000))
    assert info.value.estimate == 10000
    assert info.value.exit_code == 3


def test_origin_cell_carries_the_length():
    assert dict(grid_sweep(2, 16, (16, 16)))[(0, 0)] == pytest.approx(16)


def test_grid_maximum_sits_at_the_origin():
    values = dict(grid_sweep(2, 64, (256, 256), workers=4))
    assert len(values) == 256 * 256
    peak = max(values.values())
    assert peak == pytest.approx(64)
    assert values[(0, 0)] == pytest.approx(peak, abs=1e-9)
