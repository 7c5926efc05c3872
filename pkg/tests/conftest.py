import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent

sys.path.insert(0, str(Path(__file__).resolve().parent))

from gr1chat.dialogue import default_weights
from gr1chat.worldmodel import assert_connectivity, parse_world


@pytest.fixture(scope="session")
def weights():
    return default_weights()


def _world(name):
    return parse_world((REPO / "worlds" / name).read_text("utf-8"))


@pytest.fixture
def exp1_world():
    return _world("exp1.world")


@pytest.fixture
def exp2_world():
    return _world("exp2.world")


@pytest.fixture
def exp3_world():
    return _world("exp3.world")


@pytest.fixture
def chain_world(exp1_world):
    """Exp-1 world after both declaratives: kibo-harmony-columbus chain."""
    w, _ = assert_connectivity(exp1_world, "kibo", "harmony")
    w, _ = assert_connectivity(w, "harmony", "columbus")
    return w


@pytest.fixture(scope="session")
def repo_root():
    return REPO
