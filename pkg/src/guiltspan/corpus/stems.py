"""Crime-stem retrieval predicate used to keep only suspect-centric reports."""

import re

# Prefix stems marking reports where a suspect has been identified but the
# case is still communicated with uncertainty.
GUILT_STEMS = ("suspect", "alleg", "arrest", "crim", "accus")

_WORD_RE = re.compile(r"\w+")


def count_stem_hits(body: str, stems: tuple[str, ...] = GUILT_STEMS) -> int:
    """Total occurrences of tokens whose lowercased form starts with a stem."""
    hits = 0
    for tok in _WORD_RE.findall(body.lower()):
        if tok.startswith(stems):
            hits += 1
    return hits


def count_distinct_stems(body: str, stems: tuple[str, ...] = GUILT_STEMS) -> int:
    """Number of distinct stems with at least one matching token."""
    seen: set[str] = set()
    for tok in _WORD_RE.findall(body.lower()):
        for stem in stems:
            if tok.startswith(stem):
                seen.add(stem)
    return len(seen)
