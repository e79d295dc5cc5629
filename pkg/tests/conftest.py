import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from helpers import ALPHA01, d18_domain  # noqa: E402

from apdfilter.automata import cyclic_domain  # noqa: E402


@pytest.fixture(scope="session")
def alpha01():
    return ALPHA01


@pytest.fixture(scope="session")
def d18():
    return d18_domain()


@pytest.fixture(scope="session")
def cyc001():
    return cyclic_domain("001", ALPHA01)


@pytest.fixture(scope="session")
def runs01():
    return [cyclic_domain("0", ALPHA01), cyclic_domain("1", ALPHA01)]
