from .types import (
    AggregatedStory,
    Annotation,
    ControlResponse,
    Highlight,
    Question,
    Session,
    GUILT_QUESTIONS,
)
from .spans import merge_highlights, token_highlight_flags
from .exclusion import exclude_participants, exclude_stories, ExclusionLedger
from .aggregate import aggregate, aggregate_corpus
from .store import SessionStore

__all__ = [
    "Question",
    "GUILT_QUESTIONS",
    "Highlight",
    "Annotation",
    "ControlResponse",
    "Session",
    "AggregatedStory",
    "merge_highlights",
    "token_highlight_flags",
    "exclude_participants",
    "exclude_stories",
    "ExclusionLedger",
    "aggregate",
    "aggregate_corpus",
    "SessionStore",
]
