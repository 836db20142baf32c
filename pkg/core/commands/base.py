from abc import ABC, abstractmethod

from loguru import logger

from core.harness import write_csv
from core.models import ExperimentConfig


class Command(ABC):
    """One CLI subcommand bound to a validated configuration."""
    name = "command"

    def __init__(self, config: ExperimentConfig):
        self.config = config

    @abstractmethod
    def execute(self) -> str:
        """Run the command and return its output text."""
        pass

    def run(self) -> str:
        logger.info(f"Command: {self.name}")
        output = self.execute()
        write_csv(output, self.config.out)
        return output
