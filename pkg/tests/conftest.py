import pytest

from wimaxsim.params import derive_params, profile_table


@pytest.fixture(scope="session")
def params():
    return derive_params()


@pytest.fixture(scope="session")
def profiles():
    return profile_table()
