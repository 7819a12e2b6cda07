import warnings

import pytest

from ellnorm import EllipticalModel, chi, kotz3, uniform
from ellnorm.errors import AsymptoticWarning

# filled by tests/test_acceptance.py, printed once at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(autouse=True)
def _quiet_asymptotic_warnings():
    # tests that care about these warnings use pytest.warns explicitly
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AsymptoticWarning)
        yield


@pytest.fixture
def expo():
    return kotz3(1, 0, 1, 1)


@pytest.fixture
def gumbel_model(expo):
    """d=2, eigenvalues (1, 0.5), exponential radius."""
    return EllipticalModel.from_eigenvalues((1.0, 0.5), expo)


@pytest.fixture
def weibull_model():
    """d=2, eigenvalues (1, 0.25), uniform radius."""
    return EllipticalModel.from_eigenvalues((1.0, 0.25), uniform())


@pytest.fixture
def chi3_model():
    return EllipticalModel.from_eigenvalues((1.0, 0.5, 0.25), chi(3))


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES
