import pytest

from collarspectra import kernels


@pytest.fixture(scope="session", autouse=True)
def _jit_warmup():
    # Pay the one-time JIT compilation cost before any timed test runs.
    kernels.warmup()
