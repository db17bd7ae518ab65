import pytest

from selftrap import ProfileParams, solve_profile, zero_t_from_ubar


@pytest.fixture(scope="session")
def profile_t1():
    """Reference self-trapped profile at T = 1, U0 = 1."""
    return solve_profile(ProfileParams(T=1.0, U0=1.0))


@pytest.fixture(scope="session")
def unit_limit():
    """Box limit at unit depth."""
    return zero_t_from_ubar(1.0)
