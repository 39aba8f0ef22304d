"""Highlight-rate statistics: chance rate and majority-agreement test."""

from dataclasses import dataclass

import numpy as np

from ..annotations.spans import merge_highlights, token_highlight_flags
from ..annotations.types import GUILT_QUESTIONS, Annotation, Question
from ..corpus.types import Story
from .agreement import WelchResult, welch_t_test


def _flags_by_story(
    stories: list[Story],
    annotations: list[Annotation],
    questions: tuple[Question, ...],
) -> dict[str, list[list[bool]]]:
    """Per story: one token-flag vector per contributing (non-opt-out) annotation."""
    story_by_id = {s.id: s for s in stories}
    out: dict[str, list[list[bool]]] = {s.id: [] for s in stories}
    for ann in annotations:
        if ann.question not in questions or ann.doesnt_apply:
            continue
        story = story_by_id.get(ann.story_id)
        if story is None:
            continue
        merged = merge_highlights(ann.highlights, len(story.body))
        out[story.id].append(token_highlight_flags(story.tokens, merged))
    return out


def chance_highlight_rate(
    stories: list[Story],
    annotations: list[Annotation],
    questions: tuple[Question, ...] = GUILT_QUESTIONS,
) -> float:
    """Fraction of (annotation, token) pairs marked highlighted."""
    highlighted = 0
    total = 0
    for flag_sets in _flags_by_story(stories, annotations, questions).values():
        for flags in flag_sets:
            highlighted += sum(flags)
            total += len(flags)
    return highlighted / total if total else 0.0


def majority_rates(flag_sets_by_story: dict[str, list[list[bool]]]) -> dict[str, float]:
    """Per story: fraction of tokens highlighted by at least half the annotators."""
    rates: dict[str, float] = {}
    for sid, flag_sets in flag_sets_by_story.items():
        n = len(flag_sets)
        if n == 0 or not flag_sets[0]:
            continue
        counts = np.sum(np.asarray(flag_sets, dtype=int), axis=0)
        rates[sid] = float(np.mean(counts >= n / 2))
    return rates


def _shuffle_flag_sets(
    flag_sets_by_story: dict[str, list[list[bool]]], rng: np.random.Generator
) -> dict[str, list[list[bool]]]:
    """Each annotation keeps its highlighted-token count; positions re-drawn."""
    out: dict[str, list[list[bool]]] = {}
    for sid in sorted(flag_sets_by_story):
        shuffled = []
        for flags in flag_sets_by_story[sid]:
            k = sum(flags)
            new = [False] * len(flags)
            for idx in rng.choice(len(flags), size=k, replace=False):
                new[idx] = True
            shuffled.append(new)
        out[sid] = shuffled
    return out


@dataclass(frozen=True)
class MajorityAgreementResult:
    actual_mean: float
    shuffled_mean: float
    welch: WelchResult

    @property
    def p(self) -> float:
        return self.welch.p

    def to_dict(self) -> dict:
        return {
            "actual_mean": self.actual_mean,
            "shuffled_mean": self.shuffled_mean,
            "welch": self.welch.to_dict(),
        }


def majority_agreement_test(
    stories: list[Story],
    annotations: list[Annotation],
    questions: tuple[Question, ...] = GUILT_QUESTIONS,
    seed: int = 0,
    reps: int = 1,
) -> MajorityAgreementResult:
    """Compare per-story majority-highlight rates, actual vs shuffled."""
    flag_sets = _flags_by_story(stories, annotations, questions)
    flag_sets = {sid: fs for sid, fs in flag_sets.items() if len(fs) >= 2}
    actual = np.array(sorted(majority_rates(flag_sets).values()), dtype=float)

    rng = np.random.default_rng(seed)
    shuffled_chunks = []
    for _ in range(reps):
        shuffled_chunks.append(
            np.array(
                sorted(majority_rates(_shuffle_flag_sets(flag_sets, rng)).values()),
                dtype=float,
            )
        )
    shuffled = np.concatenate(shuffled_chunks)
    welch = welch_t_test(actual, shuffled)
    return MajorityAgreementResult(
        actual_mean=float(actual.mean()),
        shuffled_mean=float(shuffled.mean()),
        welch=welch,
    )
