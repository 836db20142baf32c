"""
Random Streams Module.

Counter-based random number streams. Every stream is a Philox generator keyed
by a 64-bit seed; the counter's high word selects the block, so block k can be
produced independently of blocks 0..k-1 and the result does not depend on the
order (or the worker) that generated it.
"""
import zlib
from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np

# Rows of a frequency matrix generated from one counter block.
BLOCK_ROWS = 1024


def derive_seed(master: int, label: str) -> int:
    """
    Split a master seed into an independent labelled 64-bit seed.

    Args:
        master: Trial/master seed.
        label: Stream name, e.g. "frequencies", "pairs", "jl", "svm".
    """
    seq = np.random.SeedSequence([int(master), zlib.crc32(label.encode("utf-8"))])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def block_generator(seed: int, block: int, lane: int = 0) -> np.random.Generator:
    """Generator for counter block `block` (sub-stream `lane`) of the stream keyed by `seed`."""
    counter = np.array([0, 0, lane, block], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=int(seed), counter=counter))


def generator(seed: int) -> np.random.Generator:
    """Single-stream generator (block 0)."""
    return block_generator(seed, 0)


def row_blocks(n_rows: int, block_rows: int = BLOCK_ROWS) -> Iterator[Tuple[int, int, int]]:
    """Yield (block index, first row, stop row) covering range(n_rows)."""
    for block, start in enumerate(range(0, n_rows, block_rows)):
        yield block, start, min(start + block_rows, n_rows)


@dataclass(frozen=True)
class TrialSeeds:
    """Per-trial master seed split into the labelled streams one trial consumes."""
    trial: int
    frequencies: int
    pairs: int
    jl: int
    svm: int
    frobenius: int

    @classmethod
    def for_trial(cls, trial_seed: int) -> 'TrialSeeds':
        return cls(
            trial=trial_seed,
            frequencies=derive_seed(trial_seed, "frequencies"),
            pairs=derive_seed(trial_seed, "pairs"),
            jl=derive_seed(trial_seed, "jl"),
            svm=derive_seed(trial_seed, "svm"),
            frobenius=derive_seed(trial_seed, "frobenius"),
        )
