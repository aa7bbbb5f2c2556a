import pytest

from algebroid.surface import DefiningEquation


@pytest.fixture(scope="session")
def sqrt_z():
    """W^2 - z = 0: the 2-valued square root."""
    return DefiningEquation.from_strings(["0", "-z"])


@pytest.fixture(scope="session")
def recip_z():
    """W - 1/z = 0: meromorphic with a simple pole at 0."""
    return DefiningEquation.from_strings(["-1/z"])


@pytest.fixture(scope="session")
def circle_eq():
    """W^2 - (1 + z^2) = 0: branch points at +-i, nonzero period at infinity."""
    return DefiningEquation.from_strings(["0", "-(1+z^2)"])


@pytest.fixture(scope="session")
def split_eq():
    """W^2 - z^2 = 0: reducible, branches +-z."""
    return DefiningEquation.from_strings(["0", "-z^2"])
