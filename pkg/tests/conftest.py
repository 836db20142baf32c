import pytest
from loguru import logger

from core.logger import LogCollector


@pytest.fixture
def log_collector():
    """Capture loguru messages (WARNING and above) for the duration of a test."""
    collector = LogCollector()
    handler_id = logger.add(collector, format="{level} {message}", level="WARNING")
    yield collector
    logger.remove(handler_id)
