import sys

import numpy as np
import pytest

from thermovar.eos import GasEos


@pytest.fixture
def gas():
    return GasEos(Cv=2.5, Cp=3.5, rho0=1.0, T0=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
