"""Rating agreement: per-story MSE, shuffled baselines, Welch's t-test.

A story's MSE is the mean squared deviation of its ratings from their own
mean (population variance). The shuffled baseline permutes all ratings of
one question across stories, preserving each story's rating count, and
recomputes the same quantity; actual vs shuffled per-story MSEs are then
compared with an unequal-variance t-test.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import stdtr

from ..annotations.types import Annotation, Question


def story_mse(ratings: list[float]) -> float:
    if len(ratings) < 2:
        raise ValueError("story MSE needs at least 2 ratings")
    arr = np.asarray(ratings, dtype=float)
    if np.all(arr == arr[0]):  # exact zero for identical ratings
        return 0.0
    return float(np.mean((arr - arr.mean()) ** 2))


def ratings_by_story(annotations: list[Annotation], question: Question) -> dict[str, list[float]]:
    out: dict[str, list[float]] = {}
    for ann in annotations:
        if ann.question == question and not ann.doesnt_apply:
            out.setdefault(ann.story_id, []).append(ann.slider)
    return out


def per_story_mses(by_story: dict[str, list[float]]) -> np.ndarray:
    """Per-story MSEs in sorted story-id order; stories with <2 ratings skipped."""
    return np.array(
        [story_mse(r) for _, r in sorted(by_story.items()) if len(r) >= 2], dtype=float
    )


def mean_story_mse(by_story: dict[str, list[float]]) -> float:
    mses = per_story_mses(by_story)
    if mses.size == 0:
        raise ValueError("no story has >= 2 ratings")
    return float(mses.mean())


def shuffle_ratings(by_story: dict[str, list[float]], rng: np.random.Generator) -> dict[str, list[float]]:
    """Permute the pooled ratings across stories, preserving per-story counts."""
    keys = sorted(by_story)
    pooled = np.concatenate([np.asarray(by_story[k], dtype=float) for k in keys])
    permuted = pooled[rng.permutation(pooled.size)]
    out: dict[str, list[float]] = {}
    pos = 0
    for k in keys:
        n = len(by_story[k])
        out[k] = permuted[pos : pos + n].tolist()
        pos += n
    return out


def shuffled_mse_baseline(
    by_story: dict[str, list[float]], seed: int = 0, reps: int = 20
) -> np.ndarray:
    """Mean story MSE for each of `reps` independent shuffles."""
    rng = np.random.default_rng(seed)
    return np.array(
        [mean_story_mse(shuffle_ratings(by_story, rng)) for _ in range(reps)], dtype=float
    )


def shuffled_per_story_mses(
    by_story: dict[str, list[float]], seed: int = 0, reps: int = 1
) -> np.ndarray:
    """Per-story MSE samples pooled over `reps` shuffles (the t-test sample)."""
    rng = np.random.default_rng(seed)
    chunks = [per_story_mses(shuffle_ratings(by_story, rng)) for _ in range(reps)]
    return np.concatenate(chunks)


@dataclass(frozen=True)
class WelchResult:
    t: float
    df: float
    p: float

    def to_dict(self) -> dict:
        return {"t": self.t, "df": self.df, "p": self.p}


def welch_t_test(a, b) -> WelchResult:
    """Unequal-variance two-sample t-test, two-sided p."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValueError("both samples need at least 2 values")
    va, vb = a.var(ddof=1), b.var(ddof=1)
    if va == 0.0 and vb == 0.0:
        if a.mean() == b.mean():
            return WelchResult(t=0.0, df=float(a.size + b.size - 2), p=1.0)
        raise ValueError("degenerate samples: zero variance in both")
    sa, sb = va / a.size, vb / b.size
    t = (a.mean() - b.mean()) / np.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (sa**2 / (a.size - 1) + sb**2 / (b.size - 1))
    p = 2.0 * (1.0 - stdtr(df, abs(t)))
    return WelchResult(t=float(t), df=float(df), p=float(min(max(p, 0.0), 1.0)))
