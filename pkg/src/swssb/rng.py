"""Reproducible random number streams for parallel ensemble sampling.

Every Monte Carlo sample gets its own counter-based stream keyed by
(master seed, sample index), so results do not depend on execution
order or thread count. Aggregation helpers use a fixed-shape pairwise
tree so sums are bit-stable as well.
"""

import numpy as np


def sample_rng(master_seed: int, sample_index: int) -> np.random.Generator:
    """Independent generator for one sample of an ensemble.

    Uses Philox keyed by the 128-bit pair (sample_index, master_seed);
    distinct keys give statistically independent, non-overlapping streams.
    """
    if master_seed < 0 or sample_index < 0:
        raise ValueError("seed and sample index must be non-negative")
    key = np.array([sample_index, master_seed], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def pairwise_sum(values) -> float:
    """Sum with a fixed binary-tree association order.

    The tree shape depends only on len(values), so the result is
    bit-identical no matter how the values were produced (serially or
    by any number of workers), as long as they are indexed by sample.
    """
    vals = list(values)
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def mean_and_stderr(values) -> tuple[float, float]:
    """Sample mean and standard error, aggregated bit-stably."""
    n = len(values)
    if n == 0:
        raise ValueError("no samples")
    mean = pairwise_sum(values) / n
    if n == 1:
        return mean, 0.0
    var = pairwise_sum([(v - mean) ** 2 for v in values]) / (n - 1)
    return mean, float(np.sqrt(var / n))
