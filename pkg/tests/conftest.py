import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from oatsim import apply_oat, build_ops, make_coherent_state


@pytest.fixture(scope="session")
def ops100():
    return build_ops(100)


@pytest.fixture(scope="session")
def plateau_state_100():
    """Twisted state at alpha = 1.0, the workhorse plateau configuration."""
    return apply_oat(make_coherent_state(100), 1.0)
