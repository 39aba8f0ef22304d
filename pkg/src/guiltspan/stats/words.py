"""Word-level highlight analysis.

For each non-stopword, non-punctuation word: corpus frequency (token
occurrences), highlight opportunities (occurrence x contributing
annotator), highlight events, and the resulting proportion, overall and
per question. Feeds the most-highlighted table, the proportion-by-
frequency scatter, and the between-question difference table.
"""

import csv
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ..annotations.spans import merge_highlights, token_highlight_flags
from ..annotations.types import GUILT_QUESTIONS, Annotation
from ..corpus.types import Story

_HAS_WORD_CHAR = re.compile(r"\w")


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Bundled English stopword snapshot (pinned in-repo for reproducibility)."""
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = resources.files("guiltspan.stats").joinpath("stopwords_en.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.split() if w.strip())


@dataclass
class WordStats:
    word: str
    frequency: int = 0  # token occurrences in the corpus
    opportunities: int = 0  # occurrence x contributing annotator pairs
    highlight_count: int = 0  # highlighted pairs
    per_question: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def proportion(self) -> float:
        return self.highlight_count / self.opportunities if self.opportunities else 0.0

    def question_proportion(self, question: str) -> float:
        q = self.per_question.get(question)
        if not q or not q["opportunities"]:
            return 0.0
        return q["highlight_count"] / q["opportunities"]

    def to_dict(self) -> dict:
        return {
            "word": self.word,
            "frequency": self.frequency,
            "opportunities": self.opportunities,
            "highlight_count": self.highlight_count,
            "proportion": self.proportion,
            "per_question": {k: dict(v) for k, v in sorted(self.per_question.items())},
        }


def word_stats(
    stories: list[Story],
    annotations: list[Annotation],
    stopwords: frozenset[str] | None = None,
    min_freq: int = 25,
) -> list[WordStats]:
    """Per-word highlight statistics, filtered to frequency >= min_freq.

    Words rarer than min_freq get exaggerated proportions and are dropped.
    Pass min_freq=1 for the unfiltered table.
    """
    stopwords = load_stopwords() if stopwords is None else stopwords
    stats: dict[str, WordStats] = {}

    story_by_id = {s.id: s for s in stories}
    anns_by_story: dict[str, list[Annotation]] = {}
    for ann in annotations:
        if ann.question in GUILT_QUESTIONS and not ann.doesnt_apply:
            anns_by_story.setdefault(ann.story_id, []).append(ann)

    for story in stories:
        words = []
        for j, tok in enumerate(story.tokens):
            w = tok.surface.lower()
            if w in stopwords or not _HAS_WORD_CHAR.search(w):
                continue
            words.append((j, w))
        for _, w in words:
            stats.setdefault(w, WordStats(word=w)).frequency += 1

        for ann in anns_by_story.get(story.id, []):
            merged = merge_highlights(ann.highlights, len(story.body))
            flags = token_highlight_flags(story.tokens, merged)
            q = ann.question.value
            for j, w in words:
                ws = stats[w]
                ws.opportunities += 1
                per_q = ws.per_question.setdefault(q, {"opportunities": 0, "highlight_count": 0})
                per_q["opportunities"] += 1
                if flags[j]:
                    ws.highlight_count += 1
                    per_q["highlight_count"] += 1

    out = [ws for ws in stats.values() if ws.frequency >= min_freq]
    out.sort(key=lambda ws: (-ws.highlight_count, ws.word))
    return out


def highlight_frequency_correlation(stats: list[WordStats]) -> float:
    """Pearson r between per-word highlight count and frequency."""
    if len(stats) < 2:
        raise ValueError("need at least 2 words")
    x = np.array([ws.frequency for ws in stats], dtype=float)
    y = np.array([ws.highlight_count for ws in stats], dtype=float)
    return float(np.corrcoef(x, y)[0, 1])


def top_highlighted(stats: list[WordStats], k: int = 30) -> list[WordStats]:
    return sorted(stats, key=lambda ws: (-ws.highlight_count, ws.word))[:k]


def question_difference_table(stats: list[WordStats]) -> list[dict]:
    """Words ranked by |proportion difference| between the two guilt questions."""
    rows = []
    for ws in stats:
        rp = ws.question_proportion("reader_perception")
        ab = ws.question_proportion("author_belief")
        rows.append(
            {
                "word": ws.word,
                "frequency": ws.frequency,
                "reader_perception": rp,
                "author_belief": ab,
                "difference": rp - ab,
            }
        )
    rows.sort(key=lambda r: (-abs(r["difference"]), r["word"]))
    return rows


def write_word_stats_csv(stats: list[WordStats], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "word",
                "frequency",
                "opportunities",
                "highlight_count",
                "proportion",
                "reader_perception_proportion",
                "author_belief_proportion",
            ]
        )
        for ws in stats:
            writer.writerow(
                [
                    ws.word,
                    ws.frequency,
                    ws.opportunities,
                    ws.highlight_count,
                    f"{ws.proportion:.6f}",
                    f"{ws.question_proportion('reader_perception'):.6f}",
                    f"{ws.question_proportion('author_belief'):.6f}",
                ]
            )
