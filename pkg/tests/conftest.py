import numpy as np
import pytest

from nbar_inclusion import weights as W

ACCEPTANCE_RESULTS = []


def builtin_families(length=20000):
    """The five weight families used across the suite."""
    return {
        "constant": W.constant(),
        "power1": W.power(1.0),
        "geometric2": W.geometric(2.0),
        "exp-1": W.exponential(-1.0),
        "explicit": W.explicit(np.random.default_rng(20240).uniform(0.5, 1.5, length)),
    }


FAMILIES = builtin_families()


@pytest.fixture(params=sorted(FAMILIES))
def family(request):
    return FAMILIES[request.param]


def rel_err(a, b):
    """Max-norm relative error of ``a`` against reference ``b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
