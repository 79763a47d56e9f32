# src/acquisition/seeding.py

"""
Splittable random streams.

Every randomised stage draws from a PCG64 generator seeded by a numpy
SeedSequence whose spawn key names the stage and, where relevant, the read,
cell or trial. Streams are therefore a pure function of (seed, key): adding
reads, cells or trials never perturbs the draws of existing ones.
"""
import numpy as np

# Stage identifiers used as the first spawn-key component
GENOME_STREAM = 1
START_STREAM = 2
NOISE_STREAM = 3
TRIAL_STREAM = 4

_MASK_64 = (1 << 64) - 1


def _seed_sequence(seed, key):
    return np.random.SeedSequence(entropy=int(seed) & _MASK_64, spawn_key=tuple(int(k) for k in key))


def derive_seed(seed, *key):
    """Returns a 64-bit integer seed for the substream (seed, *key)."""
    return int(_seed_sequence(seed, key).generate_state(1, dtype=np.uint64)[0])


def derive_rng(seed, *key):
    """Returns an independent PCG64 generator for the substream (seed, *key)."""
    return np.random.Generator(np.random.PCG64(_seed_sequence(seed, key)))
