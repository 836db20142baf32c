import sys
from typing import Callable, List, Optional

from loguru import logger

DEFAULT_FORMAT = "{time} {level} {message}"


class LogCollector:
    """
    Loguru sink that keeps formatted messages in memory.

    Optionally forwards every message to a callback (e.g. a progress display).
    """

    def __init__(self, callback: Optional[Callable[[str], None]] = None):
        self.messages: List[str] = []
        self.callback = callback

    def write(self, message):
        text = str(message).strip()
        self.messages.append(text)
        if self.callback:
            self.callback(text)

    def contains(self, fragment: str) -> bool:
        return any(fragment in m for m in self.messages)


def setup_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """Remove the default handler and install ours."""
    logger.remove()
    logger.add(sys.stderr, format=DEFAULT_FORMAT, level=level)
    if log_file:
        logger.add(log_file, format=DEFAULT_FORMAT, level="DEBUG")
