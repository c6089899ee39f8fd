import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from weylbounds.cli import main
from weylbounds.core.phase import PhasePoint

DATA_DIR = Path(__file__).parent / "data"


def random_points(seed, d, count, denominator=10 ** 6):
    """Seeded rational points with a common coordinate denominator."""
    rng = np.random.default_rng(seed)
    return [
        PhasePoint(tuple(Fraction(int(a), denominator) for a in rng.integers(0, denominator, d)))
        for _ in range(count)
    ]


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def cli(capsys):
    """Run the command line; return (exit code, stdout text)."""

    def run(*argv):
        code = main([str(a) for a in argv])
        return code, capsys.readouterr().out

    return run


@pytest.fixture
def cli_json(cli):
    def run(*argv):
        code, out = cli(*argv)
        assert code == 0, out
        return json.loads(out)

    return run
