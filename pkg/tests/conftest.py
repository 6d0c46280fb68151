import numpy as np
import pytest

from ctfourier.model import make_bessel_kingman, make_jacobi
from ctfourier.transform import Transformer

_CACHE = {}


def transformer_for(family, alpha, beta=None):
    """Default-grid transformer, built once per session per model."""
    key = (family, alpha, beta)
    if key not in _CACHE:
        model = make_bessel_kingman(alpha) if family == "bk" else make_jacobi(alpha, beta)
        _CACHE[key] = Transformer(model)
    return _CACHE[key]


@pytest.fixture(scope="session")
def bk_half():
    return transformer_for("bk", 0.5)


@pytest.fixture(scope="session")
def jacobi_half():
    return transformer_for("jacobi", 0.5, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance lines as one block at the end of the run."""
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
