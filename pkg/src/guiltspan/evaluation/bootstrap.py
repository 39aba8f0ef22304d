"""Percentile bootstrap confidence interval for the mean.

Default levels use the expanded-percentile adjustment: the plain
percentile interval of the resampled means is read at t-adjusted tail
levels, which fixes the known small-sample undercoverage (plain 2.5/97.5
covers only ~92-93% at n=20). Pass expanded=False for the unadjusted
interval.
"""

import numpy as np
from scipy import stats as sps


def bootstrap_ci(
    values,
    level: float = 0.95,
    resamples: int = 10_000,
    seed: int = 0,
    expanded: bool = True,
) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("empty sample")
    if not (0.0 < level < 1.0):
        raise ValueError("level must be in (0, 1)")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, arr.size, size=(resamples, arr.size))
    means = arr[idx].mean(axis=1)

    alpha = 1.0 - level
    if expanded and arr.size > 1:
        z = np.sqrt(arr.size / (arr.size - 1)) * sps.t.ppf(alpha / 2.0, arr.size - 1)
        tail = float(sps.norm.cdf(z)) * 100.0
    else:
        tail = alpha / 2.0 * 100.0
    lo, hi = np.percentile(means, [tail, 100.0 - tail])
    return float(lo), float(hi)
