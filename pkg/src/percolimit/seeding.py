"""Reproducible stream splitting for replica ensembles.

All randomness in the package flows from a single integer seed through
``numpy.random.SeedSequence``.  The splitting convention, relied on by every
ensemble function and by the CLI, is:

* ``SeedSequence(seed)`` is the master sequence.
* ``master.spawn(n_replicas)[i]`` belongs to replica ``i``.
* A replica that needs several independent streams (say an envelope stream
  and a driving-noise stream) spawns its own children once more, in a fixed
  documented role order.

Replica streams therefore depend only on ``(seed, replica index, role)``,
never on scheduling, worker count, or batch boundaries.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "master_sequence",
    "replica_sequences",
    "replica_generator",
    "generators_for",
    "subordinate_seed",
]


def master_sequence(seed: int) -> np.random.SeedSequence:
    if not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.SeedSequence(int(seed))


def replica_sequences(seed: int, n_replicas: int) -> list[np.random.SeedSequence]:
    """Seed sequences for replicas 0..n_replicas-1."""
    return master_sequence(seed).spawn(n_replicas)


def replica_generator(seed: int, index: int) -> np.random.Generator:
    """Generator for one replica (single-role samplers)."""
    return np.random.Generator(np.random.PCG64(master_sequence(seed).spawn(index + 1)[index]))


def generators_for(seq: np.random.SeedSequence, n_roles: int) -> list[np.random.Generator]:
    """Role generators for one replica, in fixed role order."""
    if n_roles == 1:
        return [np.random.Generator(np.random.PCG64(seq))]
    return [np.random.Generator(np.random.PCG64(child)) for child in seq.spawn(n_roles)]


def subordinate_seed(seed: int, role: int) -> int:
    """A fresh integer seed derived from ``(seed, role)``.

    Experiments that layer several independent ensembles (a discrete side and
    a limit side, say) each need their own master seed.  Folding the role into
    the entropy keeps the derived streams independent of each other and of the
    plain ``SeedSequence(seed)`` replica streams.
    """
    if not isinstance(role, (int, np.integer)) or role < 0:
        raise ValueError("role must be a non-negative integer")
    master_sequence(seed)  # validate seed the same way everywhere
    seq = np.random.SeedSequence(entropy=[int(seed), int(role)])
    return int(seq.generate_state(2, np.uint64)[0])
