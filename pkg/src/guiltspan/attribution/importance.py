"""Corpus-level views of attribution scores and the highlight comparison."""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..stats.agreement import WelchResult, welch_t_test
from ..stats.words import WordStats, load_stopwords
from .integrated_gradients import AttributionResult


@dataclass
class WordImportance:
    word: str
    frequency: int          # scored occurrences across attribution runs
    mean_importance: float  # signed mean
    mean_abs_importance: float

    def to_dict(self) -> dict:
        return {
            "word": self.word,
            "frequency": self.frequency,
            "mean_importance": self.mean_importance,
            "mean_abs_importance": self.mean_abs_importance,
        }


def aggregate_importance(
    results: list[AttributionResult],
    stopwords: frozenset[str] | None = None,
    min_freq: int = 1,
) -> list[WordImportance]:
    """Per-word mean signed importance over every scored occurrence."""
    stopwords = load_stopwords() if stopwords is None else stopwords
    sums: dict[str, float] = {}
    abs_sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for res in results:
        for word, score in zip(res.words, res.word_scores):
            w = word.lower()
            if w in stopwords or not any(c.isalnum() for c in w):
                continue
            sums[w] = sums.get(w, 0.0) + score
            abs_sums[w] = abs_sums.get(w, 0.0) + abs(score)
            counts[w] = counts.get(w, 0) + 1
    out = [
        WordImportance(
            word=w,
            frequency=counts[w],
            mean_importance=sums[w] / counts[w],
            mean_abs_importance=abs_sums[w] / counts[w],
        )
        for w in counts
        if counts[w] >= min_freq
    ]
    out.sort(key=lambda wi: (-abs(wi.mean_importance), wi.word))
    return out


@dataclass
class HighlightComparison:
    pearson_r: float
    welch: WelchResult
    n_words: int
    n_above_chance: int

    def to_dict(self) -> dict:
        return {
            "pearson_r": self.pearson_r,
            "welch": self.welch.to_dict(),
            "n_words": self.n_words,
            "n_above_chance": self.n_above_chance,
        }


def compare_to_highlights(
    importance: list[WordImportance],
    word_stats: list[WordStats],
    chance_rate: float,
) -> HighlightComparison:
    """Pearson r between |importance| and highlight proportion over the
    shared vocabulary, plus a Welch test of signed importance for words
    highlighted above vs below the chance rate."""
    stats_by_word = {ws.word: ws for ws in word_stats}
    shared = [wi for wi in importance if wi.word in stats_by_word]
    if not shared:
        raise ValueError("no shared vocabulary between importance and word stats")

    abs_imp = np.array([wi.mean_abs_importance for wi in shared])
    props = np.array([stats_by_word[wi.word].proportion for wi in shared])
    if len(shared) < 2 or np.allclose(abs_imp, abs_imp[0]) or np.allclose(props, props[0]):
        r = float("nan")
    else:
        r = float(np.corrcoef(abs_imp, props)[0, 1])

    above = [wi.mean_importance for wi in shared if stats_by_word[wi.word].proportion > chance_rate]
    below = [wi.mean_importance for wi in shared if stats_by_word[wi.word].proportion <= chance_rate]
    welch = welch_t_test(above, below)
    return HighlightComparison(
        pearson_r=r, welch=welch, n_words=len(shared), n_above_chance=len(above)
    )


def write_importance_csv(
    importance: list[WordImportance],
    path: str | Path,
    top_words: set[str] | None = None,
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["word", "frequency", "mean_importance", "mean_abs_importance",
                         "top_highlighted"])
        for wi in importance:
            writer.writerow(
                [wi.word, wi.frequency, f"{wi.mean_importance:.8f}",
                 f"{wi.mean_abs_importance:.8f}",
                 int(top_words is not None and wi.word in top_words)]
            )
