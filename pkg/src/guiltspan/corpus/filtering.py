"""Archive filtering: length/stem predicates, incident-log rejection, title dedup.

Per-story checks run first (multi_report, too_long, too_few_stems, in that
order); title dedup then runs over the survivors, keeping the earliest
published copy (ties broken by id). The accepted set is therefore
independent of archive order.
"""

import re

from .scrub import scrub
from .stems import count_stem_hits, count_distinct_stems
from .tokenize import tokenize_with_offsets, word_count
from .types import FilterReport, RawStory, Story


class ArchiveError(ValueError):
    """Malformed input archive (e.g. duplicate story ids)."""


# Lines that look like one entry of an incident log: a leading date or
# clock-time, optionally followed by a separator. Stories that are mostly
# such lines are blotters, not single reports.
_INCIDENT_LINE_RE = re.compile(
    r"""^\s*(?:
        \d{1,2}[/-]\d{1,2}(?:[/-]\d{2,4})?      # 12/03, 12-03-2019
      | (?:jan|feb|mar|apr|may|jun|jul|aug|sep|oct|nov|dec)[a-z]*\.?\s+\d{1,2}
      | \d{1,2}:\d{2}\s*(?:a\.?m\.?|p\.?m\.?)?  # 3:45 p.m., 15:45
    )\s*(?:[-–:,]|\s)""",
    re.IGNORECASE | re.VERBOSE,
)


def looks_like_incident_log(body: str, min_lines: int = 3) -> bool:
    hits = sum(1 for line in body.split("\n") if _INCIDENT_LINE_RE.match(line))
    return hits >= min_lines


def filter_archive(
    archive: list[RawStory],
    max_words: int = 300,
    min_stem_hits: int = 4,
    stem_mode: str = "occurrences",
    incident_log_lines: int = 3,
    ad_patterns: list[str] | None = None,
) -> tuple[list[Story], FilterReport]:
    """Scrub and filter a raw archive down to the annotatable corpus.

    stem_mode selects how the stem threshold is read: "occurrences" counts
    every matching token, "distinct" counts distinct matched stems.
    """
    if stem_mode not in ("occurrences", "distinct"):
        raise ValueError(f"unknown stem_mode {stem_mode!r}")

    ids = [s.id for s in archive]
    if len(set(ids)) != len(ids):
        raise ArchiveError("duplicate story ids in archive")

    report = FilterReport(input_count=len(archive))
    stem_counter = count_stem_hits if stem_mode == "occurrences" else count_distinct_stems

    survivors: list[tuple[RawStory, int, int]] = []  # (scrubbed, word_count, stem_hits)
    for raw in archive:
        clean = scrub(raw, ad_patterns)
        if looks_like_incident_log(clean.body, incident_log_lines):
            report.reject("multi_report")
            continue
        wc = word_count(clean.body)
        if wc > max_words:
            report.reject("too_long")
            continue
        hits = stem_counter(clean.body)
        if hits < min_stem_hits:
            report.reject("too_few_stems")
            continue
        survivors.append((clean, wc, hits))

    # Dedup on exact title: keep earliest published date, then smallest id.
    by_title: dict[str, tuple[RawStory, int, int]] = {}
    for entry in survivors:
        story = entry[0]
        best = by_title.get(story.title)
        if best is None or (story.published, story.id) < (best[0].published, best[0].id):
            by_title[story.title] = entry
    kept_keys = {entry[0].id for entry in by_title.values()}

    accepted: list[Story] = []
    for clean, wc, hits in survivors:
        if clean.id not in kept_keys:
            report.reject("duplicate_title")
            continue
        story = Story(
            id=clean.id,
            title=clean.title,
            body=clean.body,
            word_count=wc,
            stem_hits=hits,
            tokens=tokenize_with_offsets(clean.body),
            community=clean.community,
            published=clean.published,
        )
        story.validate()
        accepted.append(story)
        report.accepted += 1

    report.check()
    return accepted, report
