import pytest

from support import make_realization


@pytest.fixture
def tiny():
    """D=1, N=2 scenario and realization used across solver tests."""
    return make_realization()
