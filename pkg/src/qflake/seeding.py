"""Deterministic RNG streams.

Every stochastic stage draws from its own named stream derived from the
user seed plus fixed tags. Streams are independent, so toggling one stage
(say, threshold tuning) never shifts the randomness seen by another; this
is what makes wiring equivalences (hybrid-with-fixed-threshold equals the
SMOTE run, etc.) hold bit for bit.
"""

import hashlib

import numpy as np

# stream tags, one per stochastic stage
STREAM_SUBSET = 101        # balanced-subset sampling
STREAM_FOLDS = 102         # per-class fold shuffling
STREAM_SMOTE = 103         # SMOTE row order / neighbor / interpolation draws
STREAM_MODEL = 104         # model-internal randomness (bootstrap, shuffling)
STREAM_TUNE_SPLIT = 105    # inner threshold-tuning subset selection
STREAM_SYNTH = 106         # bundled synthetic corpus generator


def rng_for(seed: int, *tags: int) -> np.random.Generator:
    """Return a Generator seeded from ``(seed, *tags)``.

    ``seed`` must be a non-negative integer (the CLI enforces u64).
    """
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.default_rng([seed, *[int(t) for t in tags]])


def derive_seed(seed: int, *tags) -> int:
    """Mix a seed with context tags (fold index, stage name, ...) into a new
    63-bit seed. Stable across platforms and runs.
    """
    payload = repr((int(seed), tags)).encode("utf-8")
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1
