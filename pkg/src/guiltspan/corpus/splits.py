"""Deterministic corpus partitioning for pretraining and fine-tuning."""

from typing import Sequence, TypeVar

import numpy as np

T = TypeVar("T")


def split_corpus(
    stories: Sequence[T],
    ratios: Sequence[float] = (0.8, 0.1, 0.1),
    seed: int = 0,
    key=None,
) -> tuple[list[T], ...]:
    """Partition stories into len(ratios) disjoint, exhaustive parts.

    Stories are sorted by `key` (default: their `id` attribute, else identity
    order of a sorted copy) before the seeded shuffle, so the partition
    depends only on (story set, ratios, seed). Sizes follow the
    largest-remainder rule.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)}")
    if any(r < 0 for r in ratios):
        raise ValueError("ratios must be nonnegative")
    n = len(stories)
    n_parts = sum(1 for r in ratios if r > 0)
    if n < n_parts:
        raise ValueError(f"{n} stories cannot fill {n_parts} nonempty partitions")

    if key is None:
        key = lambda s: getattr(s, "id", s)
    ordered = sorted(stories, key=key)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)

    sizes = [int(n * r) for r in ratios]
    remainders = [n * r - int(n * r) for r in ratios]
    # Hand out leftover slots by largest remainder; never leave a positive
    # ratio empty if a zero-ratio part could absorb the slot instead.
    leftover = n - sum(sizes)
    order = sorted(
        range(len(ratios)),
        key=lambda i: (-remainders[i], -(ratios[i] > 0 and sizes[i] == 0), i),
    )
    for i in order[:leftover]:
        sizes[i] += 1
    for i, r in enumerate(ratios):
        if r > 0 and sizes[i] == 0:
            donor = max(range(len(ratios)), key=lambda j: sizes[j])
            sizes[donor] -= 1
            sizes[i] += 1

    parts: list[list[T]] = []
    pos = 0
    for size in sizes:
        parts.append([ordered[j] for j in perm[pos : pos + size]])
        pos += size
    return tuple(parts)
