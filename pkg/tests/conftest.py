import pytest

from ginfield.bessel import build_root_table


@pytest.fixture(scope="session")
def table():
    """Shared root table large enough for every non-acceptance test."""
    return build_root_table(70, 70)


@pytest.fixture(scope="session")
def small_table():
    return build_root_table(16, 16)
