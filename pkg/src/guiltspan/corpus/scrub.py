"""Body scrubbing: delete phone numbers and ad-boilerplate lines.

Scrubbing only ever deletes text (matched phone spans, whole boilerplate
lines), so the output body is never longer than the input and a second
pass is a no-op.
"""

import re

from .types import RawStory

# US-style phone numbers, with optional +1/1 prefix. Word/digit boundaries on
# both sides so partial digit runs are never chewed up (keeps scrub idempotent).
_PHONE_PATTERNS = [
    r"(?:\+?1[-.\s]?)?\(\d{3}\)\s?\d{3}[-.\s]?\d{4}",  # (555) 123-4567
    r"(?:\+?1[-.\s])?\d{3}[-.]\d{3}[-.]\d{4}",         # 555-123-4567 / 555.123.4567
    r"(?:\+?1\s)?\d{3}\s\d{3}[-.\s]\d{4}",             # 555 123 4567
    r"\d{3}[-.]\d{4}",                                 # 123-4567 (local)
]
PHONE_RE = re.compile(
    r"(?<![\d-])(?:" + "|".join(_PHONE_PATTERNS) + r")(?![\d-])"
)

# Promo/ad boilerplate commonly injected into local-news story bodies. A line
# matching any pattern is dropped whole. Case-insensitive substring search.
DEFAULT_AD_PATTERNS = [
    r"subscribe to .* newsletter",
    r"sign up for .*(newsletter|breaking news alerts)",
    r"download (the|our) .*app",
    r"follow us on (facebook|twitter|instagram)",
    r"get the .* newsletter",
    r"this (article|post) is an advertisement",
    r"want to advertise",
    r"daily newsletter .* inbox",
]


def _compile_ad_patterns(patterns: list[str]) -> list[re.Pattern]:
    return [re.compile(p, re.IGNORECASE) for p in patterns]


def scrub_text(body: str, ad_patterns: list[str] | None = None) -> str:
    pats = _compile_ad_patterns(DEFAULT_AD_PATTERNS if ad_patterns is None else ad_patterns)
    lines = body.split("\n")
    kept = [ln for ln in lines if not any(p.search(ln) for p in pats)]
    body = "\n".join(kept)
    return PHONE_RE.sub("", body)


def scrub(raw: RawStory, ad_patterns: list[str] | None = None) -> RawStory:
    """Return a copy of the story with phone numbers and ad lines deleted."""
    cleaned = scrub_text(raw.body, ad_patterns)
    if cleaned == raw.body:
        return raw
    return RawStory(
        id=raw.id,
        title=raw.title,
        body=cleaned,
        community=raw.community,
        published=raw.published,
    )
