import numpy as np
import pytest

from hetnet.core import MarketParams


@pytest.fixture
def duo_market():
    """Two unequal providers: alpha 0.5, equal user densities, density 2, B = (2, 1)."""
    return MarketParams(alpha=0.5, r0=50.0, n_m=50.0, n_f=50.0)


@pytest.fixture
def invest_market():
    return MarketParams(alpha=0.5, r0=50.0, n_m=50.0, n_f=100.0)


@pytest.fixture
def game_market():
    return MarketParams(alpha=0.7, r0=50.0, n_m=40.0, n_f=100.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


def random_params(rng, alpha=(0.1, 0.9)):
    return MarketParams(
        alpha=float(rng.uniform(*alpha)),
        r0=float(rng.uniform(1.0, 100.0)),
        n_m=float(rng.uniform(5.0, 200.0)),
        n_f=float(rng.uniform(5.0, 200.0)),
    )


_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
