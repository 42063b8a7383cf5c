"""Seed derivation for independent, content-addressed random streams.

Every stochastic component draws from its own PCG64 stream whose seed is
derived from (base seed, purpose tags). Streams are therefore independent
of execution order and of each other, which is what makes sweeps and
parallel workers reproducible.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _tag_to_int(tag) -> int:
    """Hash an arbitrary tag (str, int, float) to a stable 64-bit integer."""
    if isinstance(tag, (int, np.integer)):
        text = "i:%d" % int(tag)
    elif isinstance(tag, float):
        # canonical text form so 0.30000000000000004 and 0.3 stay distinct
        # only when they actually differ at full precision
        text = "f:%r" % tag
    else:
        text = "s:%s" % tag
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def seed_sequence(base_seed: int, *tags) -> np.random.SeedSequence:
    """Build a SeedSequence from a base seed and any number of purpose tags."""
    entropy = [int(base_seed) & 0xFFFFFFFFFFFFFFFF]
    entropy.extend(_tag_to_int(t) for t in tags)
    return np.random.SeedSequence(entropy)


def stream(base_seed: int, *tags) -> np.random.Generator:
    """A PCG64 generator for the stream named by (base_seed, *tags)."""
    return np.random.Generator(np.random.PCG64(seed_sequence(base_seed, *tags)))


def int_seed(base_seed: int, *tags) -> int:
    """A plain 63-bit integer seed for code that cannot take a Generator."""
    return int(seed_sequence(base_seed, *tags).generate_state(1, np.uint64)[0] >> 1)
