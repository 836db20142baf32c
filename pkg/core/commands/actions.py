from typing import List, Optional

from loguru import logger

from core.errors import ConfigError
from core.harness import (compress, cross_validate, emit_csv, emit_cv_csv, run_experiment, sweep_j,
                          sweep_s)
from core.models import ExperimentConfig

from .base import Command


# --- COMPRESS ---
class CompressCommand(Command):
    """Write the compressed feature map (JSON record) of the first trial."""
    name = "compress"

    def execute(self) -> str:
        cm = compress(self.config)
        logger.info(f"Command: compressed map keeps {cm.n_features} of {cm.j_plus} features")
        return cm.to_json() + "\n"


# --- EVAL ---
class EvalCommand(Command):
    """Frobenius error and/or test accuracy over trials, as CSV."""
    name = "eval"

    def execute(self) -> str:
        return emit_csv(run_experiment(self.config))


# --- SWEEPS ---
class SweepSCommand(Command):
    name = "sweep-s"

    def __init__(self, config: ExperimentConfig, s_values: Optional[List[int]] = None):
        super().__init__(config)
        self.s_values = s_values or [config.s_pairs]

    def execute(self) -> str:
        return emit_csv(sweep_s(self.config, self.s_values))


class SweepJCommand(Command):
    name = "sweep-j"

    def __init__(self, config: ExperimentConfig, j_values: Optional[List[int]] = None):
        super().__init__(config)
        self.j_values = j_values or config.j

    def execute(self) -> str:
        return emit_csv(sweep_j(self.config, self.j_values))


# --- CROSS-VALIDATION ---
class CvCommand(Command):
    """(gamma, C) grid search; CSV gamma,C,mean_accuracy."""
    name = "cv"

    def execute(self) -> str:
        return emit_cv_csv(cross_validate(self.config))


COMMANDS = {
    CompressCommand.name: CompressCommand,
    EvalCommand.name: EvalCommand,
    SweepSCommand.name: SweepSCommand,
    SweepJCommand.name: SweepJCommand,
    CvCommand.name: CvCommand,
}


def make_command(name: str, config: ExperimentConfig, values: Optional[List[int]] = None) -> Command:
    """Instantiate subcommand `name`; `values` are the swept S or J values."""
    if name not in COMMANDS:
        raise ConfigError(f"Unknown command: {name}")
    cls = COMMANDS[name]
    if cls in (SweepSCommand, SweepJCommand):
        return cls(config, values)
    return cls(config)
