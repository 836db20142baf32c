import argparse
import sys
from typing import Dict, List, Optional

from loguru import logger

from core.commands.actions import COMMANDS, make_command
from core.config import build_config, load_config_file
from core.errors import ConfigError, DatasetIOError, KernelCompressionError, LibsvmParseError
from core.logger import setup_logging

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1), not argparse's exit 2."""

    def error(self, message):
        raise ConfigError(message)


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise ConfigError(f"expected a comma-separated list of integers, got '{text}'") from e


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="kfcompress",
        description="Random Fourier feature compression experiments.",
        epilog="Timing columns are measured wall-clock times, so eval and sweep output differs between "
               "runs. Pass --no-timings for byte-identical CSV across reruns with the same seed.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS), help="subcommand to run")
    parser.add_argument("--config", help="key=value settings file (flags override it)")
    parser.add_argument("--train", help="training data (LIBSVM)")
    parser.add_argument("--test", help="test data (LIBSVM); default holds out part of --train")
    parser.add_argument("--dim", type=int, help="override the feature dimension")
    parser.add_argument("--kernel", choices=["rbf", "laplace", "cauchy"])
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--method", choices=["rfm", "rfm-jl", "rfm-fw", "rfm-giga"])
    parser.add_argument("--sampling", choices=["mc", "halton"])
    parser.add_argument("--scramble", action="store_const", const=True, help="scramble the Halton sequence")
    parser.add_argument("--jplus", type=int, help="number of up-projected features J+")
    parser.add_argument("--j", help="target feature count(s), comma separated")
    parser.add_argument("--s", help="number of sampled pairs S (comma separated for sweep-s)")
    parser.add_argument("--trials", type=int)
    parser.add_argument("--seed", type=int, help="base seed; trial t uses seed + t")
    parser.add_argument("--task", choices=["frobenius", "classify", "both"])
    parser.add_argument("--learner", choices=["svm", "ridge"])
    parser.add_argument("--C", dest="svm_c", type=float, help="SVM box constraint")
    parser.add_argument("--lambda", dest="ridge_lambda", type=float, help="ridge regularization")
    parser.add_argument("--frob-m", dest="frob_m", type=int, help="rows sampled for the Frobenius error")
    parser.add_argument("--n-jobs", dest="n_jobs", type=int, help="concurrent trials")
    parser.add_argument("--no-timings", dest="timings", action="store_const", const=False,
                        help="report every timing column as 0; eval and sweep CSV is then byte-identical across reruns")
    parser.add_argument("--out", help="output path (default stdout)")
    parser.add_argument("--log-level", default="INFO")
    parser.add_argument("--log-file")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, object]:
    overrides = {
        key: getattr(args, key)
        for key in ("train", "test", "dim", "kernel", "gamma", "method", "sampling", "scramble", "trials",
                    "task", "learner", "svm_c", "ridge_lambda", "frob_m", "n_jobs", "timings", "out")
    }
    overrides["j_plus"] = args.jplus
    overrides["base_seed"] = args.seed
    overrides["j"] = args.j
    if args.s is not None:
        overrides["s_pairs"] = _int_list(args.s)[0]
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as e:
        setup_logging()
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    setup_logging(args.log_level, args.log_file)

    try:
        file_values = load_config_file(args.config) if args.config else {}
        config = build_config(file_values, _overrides(args))
        values = _int_list(args.s) if args.command == "sweep-s" and args.s else None
        if args.command == "sweep-j":
            values = config.j
        make_command(args.command, config, values).run()
    except ConfigError:
        logger.exception("Configuration error")
        return EXIT_CONFIG
    except (DatasetIOError, LibsvmParseError, OSError):
        logger.exception("I/O error")
        return EXIT_IO
    except (KernelCompressionError, ValueError):
        logger.exception("Experiment failed")
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
