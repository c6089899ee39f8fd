import itertools

import numpy as np
import pytest

from weylbounds.errors import InvalidParameterError, ResourceCapError
from weylbounds.meanvalue import vinogradov, vinogradov_count, vinogradov_count_naive


def test_small_cases():
    assert vinogradov_count(2, 3, 1).J == 1
    assert vinogradov_count(2, 3, 2).J == 20
    assert vinogradov_count_naive(2, 3, 2).J == 20


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5, 6])
@pytest.mark.parametrize("d,s", [(2, 3), (2, 2), (3, 2), (1, 2)])
def test_meet_in_the_middle_equals_enumeration(d, s, N):
    assert vinogradov_count(d, s, N).J == vinogradov_count_naive(d, s, N).J


@pytest.mark.parametrize("d", [1, 2, 5])
@pytest.mark.parametrize("N", [1, 7, 30])
def test_single_variable_is_diagonal(d, N):
    assert vinogradov_count(d, 1, N).J == N


def test_counter_path_matches_array_path(monkeypatch):
    expected = vinogradov_count(3, 2, 9).J
    monkeypatch.setattr(vinogradov, "INT64_SAFE", 0)
    assert vinogradov_count(3, 2, 9).J == expected


def test_enumeration_cap():
    with pytest.raises(ResourceCapError) as info:
        vinogradov_count(2, 3, 100, cap=10 ** 6)
    assert info.value.estimate == 100 ** 6


@pytest.mark.parametrize("args", [(0, 2, 3), (2, 0, 3), (2, 2, 0)])
def test_argument_validation(args):
    with pytest.raises(InvalidParameterError):
        vinogradov_count(*args)


def test_record_fields():
    assert vinogradov_count(2, 3, 2).to_dict() == {"J": 20, "s": 3, "d": 2, "N": 2}


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5, 6])
@pytest.mark.parametrize("d,s", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_count_is_at_least_diagonal(d, s, N):
    assert vinogradov_count(d, s, N).J >= N ** s


@pytest.mark.parametrize("d,s,N", [(2, 2, 4), (2, 3, 3), (3, 2, 5)])
def test_solutions_are_symmetric_under_side_swap(d, s, N):
    def key(side):
        return tuple(sum(n ** j for n in side) for j in range(1, d + 1))

    sides = list(itertools.product(range(1, N + 1), repeat=s))
    solutions = {(a, b) for a in sides for b in sides if key(a) == key(b)}
    assert {(b, a) for a, b in solutions} == solutions
    assert len(solutions) == vinogradov_count(d, s, N).J


def test_numpy_integer_arguments():
    assert vinogradov_count(np.int64(2), np.int64(3), np.int64(2)).J == 20
    with pytest.raises(InvalidParameterError):
        vinogradov_count(np.float64(2), 3, 2)
