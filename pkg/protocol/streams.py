"""
Seeded random streams.

Every sampling call takes an explicit ``numpy.random.Generator`` so runs are
bit-reproducible. Child seeds come from ``SeedSequence.spawn`` and are plain
integers, which keeps them printable in CSV rows and re-usable on the CLI.
"""
from typing import List

import numpy as np

RandomStream = np.random.Generator


def make_stream(seed: int) -> RandomStream:
    """PCG64 generator for a 64-bit seed"""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn_seeds(seed: int, count: int) -> List[int]:
    """Independent child seeds derived from ``seed``"""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]
