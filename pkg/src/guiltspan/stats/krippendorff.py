"""Krippendorff's alpha for nominal data with varying raters per unit.

alpha = 1 - D_o/D_e over the coincidence matrix; each unit with m >= 2
values contributes its within-unit value pairs weighted by 1/(m-1). Units
with fewer than two values are unpairable and ignored. When every pairable
value is identical the expected disagreement is zero and alpha is
undefined; we signal that case with NaN.
"""

import math
from collections import Counter
from typing import Iterable, Sequence

from ..annotations.spans import merge_highlights, token_highlight_flags
from ..annotations.types import Annotation, Question
from ..corpus.types import Story


def krippendorff_alpha(units: Iterable[Sequence]) -> float:
    value_counts: Counter = Counter()
    observed_match = 0.0  # sum over c of o_cc
    n_total = 0.0
    for unit in units:
        m = len(unit)
        if m < 2:
            continue
        n_total += m
        cnt = Counter(unit)
        for c, nc in cnt.items():
            value_counts[c] += nc
            observed_match += nc * (nc - 1) / (m - 1)

    if n_total == 0:
        raise ValueError("no unit has >= 2 values")
    if len(value_counts) < 2:
        return math.nan

    # Nominal distance: disagreement = all cross-value pairs.
    d_observed = (n_total - observed_match) / n_total
    sum_sq = sum(v * v for v in value_counts.values())
    d_expected = (n_total * n_total - sum_sq) / (n_total * (n_total - 1))
    if d_expected == 0.0:
        return math.nan
    return 1.0 - d_observed / d_expected


def highlight_units(
    stories: list[Story],
    annotations: list[Annotation],
    question: Question,
    unit: str = "token",
) -> list[list[int]]:
    """Binary highlight indicators per token (or character), one unit each.

    An annotator contributes to a story's units iff they answered the given
    question there without opting out; absent annotators are missing data.
    """
    if unit not in ("token", "character"):
        raise ValueError(f"unknown unit {unit!r}")
    by_story: dict[str, list[Annotation]] = {}
    for ann in annotations:
        if ann.question == question and not ann.doesnt_apply:
            by_story.setdefault(ann.story_id, []).append(ann)

    units: list[list[int]] = []
    for story in stories:
        anns = by_story.get(story.id, [])
        if len(anns) < 2:
            continue
        if unit == "token":
            per_ann = [
                token_highlight_flags(
                    story.tokens, merge_highlights(a.highlights, len(story.body))
                )
                for a in anns
            ]
            width = len(story.tokens)
        else:
            per_ann = []
            for a in anns:
                flags = [False] * len(story.body)
                for h in merge_highlights(a.highlights, len(story.body)):
                    for i in range(h.char_start, h.char_end):
                        flags[i] = True
                per_ann.append(flags)
            width = len(story.body)
        for j in range(width):
            units.append([int(flags[j]) for flags in per_ann])
    return units
