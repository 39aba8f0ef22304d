"""One-sided Wilcoxon signed-rank test for paired MSE samples.

Tests whether A improves on B: differences a-b with zeros dropped, midranks
over |d|, statistic W+ = sum of ranks with d > 0. Small W+ is evidence
that A's values are lower. p = P(W+ <= observed) under random signs,
computed from the exact distribution for n <= exact_threshold (ties
handled via doubled midranks) and a normal approximation with the
tie-corrected variance above that. No continuity correction.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float  # W+
    n: int            # non-zero pairs
    p: float
    method: str       # "exact" | "normal" | "degenerate"
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "n": self.n,
            "p": self.p,
            "method": self.method,
            "degenerate": self.degenerate,
        }


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1  # 1-based average rank of the tie block
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _exact_p(doubled_ranks: list[int], doubled_w: int) -> float:
    """P(W+ <= w) by counting sign subsets; DP over doubled-rank sums."""
    total = sum(doubled_ranks)
    counts = np.zeros(total + 1, dtype=float)
    counts[0] = 1.0
    for r in doubled_ranks:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: counts.size - r]
        counts = counts + shifted
    cum = counts[: min(doubled_w, total) + 1].sum()
    return float(cum / 2.0 ** len(doubled_ranks))


def wilcoxon_signed_rank(a, b, exact_threshold: int = 25) -> WilcoxonResult:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired samples of equal length required")
    if a.size < 5:
        raise ValueError("need at least 5 pairs")
    d = a - b
    d = d[d != 0]
    n = d.size
    if n == 0:
        return WilcoxonResult(statistic=0.0, n=0, p=math.nan, method="degenerate",
                              degenerate=True)
    ranks = _midranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())

    if n <= exact_threshold:
        doubled = [int(round(2 * r)) for r in ranks]
        p = _exact_p(doubled, int(round(2 * w_plus)))
        return WilcoxonResult(statistic=w_plus, n=n, p=p, method="exact")

    mu = ranks.sum() / 2.0
    sigma = math.sqrt(float((ranks**2).sum()) / 4.0)
    z = (w_plus - mu) / sigma
    return WilcoxonResult(statistic=w_plus, n=n, p=float(ndtr(z)), method="normal")
