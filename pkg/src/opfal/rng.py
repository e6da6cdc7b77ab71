"""Named, counter-based random streams.

Every stochastic component of the pipeline (regime multipliers, regional
factors, individual noise, weight init, AL tie-breaking) draws from its own
Philox stream keyed by (root seed, label). Stream isolation keeps the shared
datasets bit-identical across variants even though the variants consume
different amounts of randomness.
"""

from __future__ import annotations

import hashlib

import numpy as np


def stream(seed: int, name: str) -> np.random.Generator:
    """Return an independent generator keyed by (seed, name)."""
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 8], "little") for i in range(0, 32, 8)]
    entropy = [int(seed) & 0xFFFF_FFFF_FFFF_FFFF, *words]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
