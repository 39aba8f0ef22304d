"""Highlight interval algebra and character-to-token alignment."""

from ..corpus.types import Token
from .types import Highlight


def merge_highlights(raw: list[Highlight], body_length: int | None = None) -> list[Highlight]:
    """Sort and merge intervals; directly adjacent marks count as one.

    The covered character set is unchanged. Out-of-bounds intervals are
    rejected when body_length is given.
    """
    if body_length is not None:
        for h in raw:
            if h.char_end > body_length:
                raise ValueError(
                    f"highlight ({h.char_start}, {h.char_end}) exceeds body length {body_length}"
                )
    if not raw:
        return []
    merged: list[Highlight] = []
    for h in sorted(raw):
        if merged and h.char_start <= merged[-1].char_end:
            last = merged[-1]
            if h.char_end > last.char_end:
                merged[-1] = Highlight(last.char_start, h.char_end)
        else:
            merged.append(h)
    return merged


def token_highlight_flags(tokens: list[Token], highlights: list[Highlight]) -> list[bool]:
    """A token counts as highlighted if any of its characters is covered.

    Expects merged (sorted, non-overlapping) highlights; runs a single sweep.
    """
    flags = [False] * len(tokens)
    hi = 0
    for ti, tok in enumerate(tokens):
        while hi < len(highlights) and highlights[hi].char_end <= tok.char_start:
            hi += 1
        if hi < len(highlights) and highlights[hi].char_start < tok.char_end:
            flags[ti] = True
    return flags
