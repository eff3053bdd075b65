import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(12345))


def random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def real_spectrum_matrix(rng, n, spread=1.0):
    """``V diag(real) V^-1`` with well separated real eigenvalues."""
    E = np.sort(rng.uniform(-3, 3, n))
    E = E + np.arange(n) * 0.5
    V = np.eye(n) + spread * 0.3 * random_complex(rng, n)
    return V @ np.diag(E) @ np.linalg.inv(V), E


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
