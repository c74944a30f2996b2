import pytest

from kostkavol.core.base.log import GlobalLogger


@pytest.fixture(autouse=True)
def fresh_logger():
    # handlers hold on to the sys.stderr of the test that created them
    GlobalLogger.reset()
    yield
    GlobalLogger.reset()
