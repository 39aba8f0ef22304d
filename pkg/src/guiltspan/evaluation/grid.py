"""K-fold cross-validated grid search with the checkpoint-step rule.

The trainer callable owns all model mechanics; this module owns fold
assignment, config scoring (mean best validation loss over folds), and the
final-step rule: train the winner for the checkpoint step count nearest
1.25x the mean of its folds' best-checkpoint steps.
"""

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class FoldOutcome:
    best_step: int
    best_val_loss: float


# trainer(train_items, val_items, config) -> FoldOutcome
Trainer = Callable[[list, list, dict], FoldOutcome]


@dataclass
class ConfigScore:
    config: dict
    fold_outcomes: list[FoldOutcome]

    @property
    def mean_val_loss(self) -> float:
        return float(np.mean([f.best_val_loss for f in self.fold_outcomes]))

    @property
    def mean_best_step(self) -> float:
        return float(np.mean([f.best_step for f in self.fold_outcomes]))


@dataclass
class GridSearchResult:
    best_config: dict
    final_steps: int
    scores: list[ConfigScore]


def kfold_indices(n: int, folds: int, seed: int) -> list[tuple[list[int], list[int]]]:
    if n < folds:
        raise ValueError(f"{n} items cannot fill {folds} folds")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    chunks = np.array_split(perm, folds)
    out = []
    for i in range(folds):
        val = chunks[i].tolist()
        train = [int(x) for j, c in enumerate(chunks) if j != i for x in c]
        out.append((train, val))
    return out


def final_steps_rule(best_steps: Sequence[int], checkpoint_every: int, factor: float = 1.25) -> int:
    """Checkpoint step count nearest factor x mean(best steps); half rounds up."""
    target = factor * float(np.mean(best_steps))
    ticks = int(np.floor(target / checkpoint_every + 0.5))
    return max(checkpoint_every, ticks * checkpoint_every)


def cv_grid_search(
    train_set: list,
    grid: list[dict],
    trainer: Trainer,
    folds: int = 5,
    seed: int = 0,
    checkpoint_every: int = 100,
) -> GridSearchResult:
    """Score every config on identical folds; ties keep grid order."""
    if not grid:
        raise ValueError("empty grid")
    fold_idx = kfold_indices(len(train_set), folds, seed)
    scores: list[ConfigScore] = []
    for config in grid:
        outcomes = []
        for train_idx, val_idx in fold_idx:
            outcome = trainer(
                [train_set[i] for i in train_idx],
                [train_set[i] for i in val_idx],
                config,
            )
            outcomes.append(outcome)
        scores.append(ConfigScore(config=config, fold_outcomes=outcomes))

    losses = [s.mean_val_loss for s in scores]
    if all(not np.isfinite(x) for x in losses):
        raise RuntimeError("every grid configuration diverged")
    best = min(range(len(scores)), key=lambda i: (losses[i], i))
    winner = scores[best]
    final = final_steps_rule(
        [f.best_step for f in winner.fold_outcomes], checkpoint_every
    )
    return GridSearchResult(best_config=dict(winner.config), final_steps=final, scores=scores)
