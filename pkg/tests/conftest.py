import numpy as np
import pytest

from optomech.core import SystemParams


def rates(omega_m=4.0, g0=1e-3, n_max=1e4, **kw):
    """Parameters with kappa = 1 rad/s so that rates read in units of kappa."""
    return SystemParams.from_rates(omega_m, 1.0, g0=g0, n_max=n_max, **kw)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    from optomech.validation import CriterionResult

    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(CriterionResult(**RESULTS[n]).line())
