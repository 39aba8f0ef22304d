from .types import FilterReport, RawStory, Story, Token
from .scrub import scrub, DEFAULT_AD_PATTERNS
from .stems import count_stem_hits, count_distinct_stems, GUILT_STEMS
from .tokenize import tokenize_with_offsets, word_count
from .filtering import filter_archive, ArchiveError
from .splits import split_corpus

__all__ = [
    "RawStory",
    "Story",
    "Token",
    "FilterReport",
    "scrub",
    "DEFAULT_AD_PATTERNS",
    "count_stem_hits",
    "count_distinct_stems",
    "GUILT_STEMS",
    "tokenize_with_offsets",
    "word_count",
    "filter_archive",
    "ArchiveError",
    "split_corpus",
]
