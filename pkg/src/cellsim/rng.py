"""Addressable random streams for reproducible parallel simulation.

Every random quantity in the simulator is drawn from an ``RngStream``
identified by ``(master_seed, stream_id)``.  Stream ids for sub-tasks are
derived with a splitmix64-style hash, never with Python's salted ``hash()``,
so the same (seed, id) pair produces the same draws on any platform and for
any number of workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def mix64(*parts: int) -> int:
    """Collapse integers into a single stable 64-bit id (order-sensitive)."""
    acc = 0x243F6A8885A308D3
    for part in parts:
        acc = _splitmix64(acc ^ (int(part) & _MASK64))
    return acc


@dataclass(frozen=True)
class RngStream:
    """One independent random stream of the experiment's master seed."""

    master_seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh PCG64 generator; repeated calls restart the same sequence."""
        seq = np.random.SeedSequence(
            (self.master_seed & _MASK64, self.stream_id & _MASK64)
        )
        return np.random.Generator(np.random.PCG64(seq))

    def child(self, *parts: int) -> "RngStream":
        """Derive a sub-stream for a nested task (trial, cell, attempt...)."""
        return RngStream(self.master_seed, mix64(self.stream_id, *parts))


def trial_stream(master_seed: int, n_users: int, trial: int) -> RngStream:
    """Stream for one (user count, trial) cell of a scenario grid.

    The id depends only on ``(n_users, trial)``, so results are independent
    of execution order and worker count.
    """
    return RngStream(master_seed, mix64(n_users, trial))
