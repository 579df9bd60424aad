"""Deterministic seed derivation."""

from typing import List

import numpy as np


def derive_seed(master_seed: int, index: int) -> int:
    """Independent 32-bit seed for item `index` of a run seeded with `master_seed`."""
    return int(np.random.SeedSequence([int(master_seed), int(index)]).generate_state(1)[0])


def episode_streams(seed: int, count: int = 4) -> List[np.random.Generator]:
    """Independent generators for the random consumers of one episode."""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(int(seed)).spawn(count)]
