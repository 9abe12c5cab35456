import numpy as np
import pytest

from uapprox import _backend


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=["cython", "python"])
def backend(request):
    """Run a test once per kernel implementation."""
    if request.param == "cython" and _backend.compiled is None:
        pytest.skip("compiled kernels not built")
    prev = _backend.name
    _backend.use(request.param)
    yield request.param
    _backend.use(prev)
