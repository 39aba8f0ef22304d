"""Word-level tokenization recorded as character intervals.

These intervals are the anchor for everything downstream: highlight
alignment, token-level regression targets, and attribution scores all key
off (char_start, char_end) into the scrubbed body.
"""

import re

from .types import Token

# Words (runs of word chars) plus single punctuation marks.
_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def tokenize_with_offsets(body: str) -> list[Token]:
    return [Token(m.group(0), m.start(), m.end()) for m in _TOKEN_RE.finditer(body)]


def word_count(body: str) -> int:
    """Whitespace-delimited word count (the length predicate's definition)."""
    return len(body.split())
