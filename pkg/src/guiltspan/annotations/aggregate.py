"""Fold per-annotator responses into per-story model targets.

mean_rating is the arithmetic mean of slider values (opt-outs excluded);
token_target[j] is the fraction of contributing annotators whose merged
highlights touch token j. A question with zero contributing annotators
gets no targets.
"""

from ..corpus.types import Story
from .spans import merge_highlights, token_highlight_flags
from .types import GUILT_QUESTIONS, AggregatedStory, Annotation


def aggregate(story: Story, annotations: list[Annotation]) -> AggregatedStory:
    agg = AggregatedStory(story_id=story.id)
    for q in GUILT_QUESTIONS:
        contributing = [
            a for a in annotations
            if a.story_id == story.id and a.question == q and not a.doesnt_apply
        ]
        if not contributing:
            continue
        n = len(contributing)
        agg.mean_rating[q.value] = sum(a.slider for a in contributing) / n
        agg.n_ratings[q.value] = n

        counts = [0] * len(story.tokens)
        for ann in contributing:
            merged = merge_highlights(ann.highlights, body_length=len(story.body))
            for j, hit in enumerate(token_highlight_flags(story.tokens, merged)):
                if hit:
                    counts[j] += 1
        agg.token_target[q.value] = [c / n for c in counts]
    return agg


def aggregate_corpus(
    stories: list[Story], annotations: list[Annotation]
) -> list[AggregatedStory]:
    by_story: dict[str, list[Annotation]] = {}
    for ann in annotations:
        by_story.setdefault(ann.story_id, []).append(ann)
    return [aggregate(s, by_story.get(s.id, [])) for s in stories]
