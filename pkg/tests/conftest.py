import sys
from pathlib import Path

import numpy as np
import pytest

SCRIPTS_DIR = Path(__file__).resolve().parent.parent / "scripts"
if str(SCRIPTS_DIR) not in sys.path:
    sys.path.insert(0, str(SCRIPTS_DIR))


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture(scope="session")
def polytropic_gas():
    from eulerwave import polytropic

    return polytropic(1.4)


@pytest.fixture(scope="session")
def chaplygin_gas():
    from eulerwave import chaplygin

    return chaplygin(0.0, 1.0)


@pytest.fixture(scope="session")
def smooth_stack_16(polytropic_gas):
    """Evolved 5-slice stack of the smooth nonisentropic fixture, n=16."""
    from eulerwave import Grid, build_slice_stack
    from eulerwave.evolve import smooth_default_fixture

    grid = Grid(16, order=4)
    state = smooth_default_fixture(grid, polytropic_gas)
    return build_slice_stack(state, t_center=0.1, dt=0.1 / 4)
