"""Turn stories and aggregated targets into padded training batches.

Each subword piece inherits the highlight-proportion target of its source
word; start/end markers and padding carry no token target. Alignment back
to words (for prediction and attribution) averages piece scores per word.
"""

from dataclasses import dataclass

import numpy as np
import torch

from ..annotations.types import AggregatedStory
from ..corpus.types import Story
from .tokenizer import SubwordTokenizer


@dataclass
class TrainingExample:
    story_id: str
    input_ids: list[int]
    word_ids: list[int | None]  # piece -> source word index; None at markers
    rating: float
    token_targets: list[float]  # per piece; 0.0 where unsupervised
    token_mask: list[bool]      # True where a token target exists

    def __len__(self) -> int:
        return len(self.input_ids)


def encode_story(
    tokenizer: SubwordTokenizer, story: Story, max_length: int
) -> tuple[list[int], list[int | None]]:
    words = [t.surface for t in story.tokens]
    if not words:
        raise ValueError(f"story {story.id} has no tokens")
    return tokenizer.encode_words(words, max_length)


def build_example(
    tokenizer: SubwordTokenizer,
    story: Story,
    agg: AggregatedStory,
    question: str,
    max_length: int = 400,
    require_token_targets: bool = True,
) -> TrainingExample | None:
    """None when the story has no rating target for the question."""
    if question not in agg.mean_rating:
        return None
    input_ids, word_ids = encode_story(tokenizer, story, max_length)
    word_targets = agg.token_target.get(question)
    targets, mask = [], []
    for wid in word_ids:
        if wid is None or word_targets is None:
            targets.append(0.0)
            mask.append(False)
        else:
            targets.append(float(word_targets[wid]))
            mask.append(True)
    if require_token_targets and not any(mask):
        return None
    return TrainingExample(
        story_id=story.id,
        input_ids=input_ids,
        word_ids=word_ids,
        rating=float(agg.mean_rating[question]),
        token_targets=targets,
        token_mask=mask,
    )


def build_dataset(
    tokenizer: SubwordTokenizer,
    stories: list[Story],
    aggregated: list[AggregatedStory],
    question: str,
    max_length: int = 400,
) -> list[TrainingExample]:
    agg_by_id = {a.story_id: a for a in aggregated}
    out = []
    for story in stories:
        agg = agg_by_id.get(story.id)
        if agg is None:
            continue
        ex = build_example(tokenizer, story, agg, question, max_length)
        if ex is not None:
            out.append(ex)
    return out


@dataclass
class Batch:
    input_ids: torch.Tensor       # [B, T]
    attention_mask: torch.Tensor  # [B, T] 1 = real position
    ratings: torch.Tensor         # [B]
    token_targets: torch.Tensor   # [B, T]
    token_mask: torch.Tensor      # [B, T] bool
    story_ids: list[str]


def collate(examples: list[TrainingExample], pad_id: int, dtype=torch.float32) -> Batch:
    T = max(len(ex) for ex in examples)
    B = len(examples)
    input_ids = torch.full((B, T), pad_id, dtype=torch.long)
    attention = torch.zeros((B, T), dtype=torch.long)
    targets = torch.zeros((B, T), dtype=dtype)
    mask = torch.zeros((B, T), dtype=torch.bool)
    ratings = torch.tensor([ex.rating for ex in examples], dtype=dtype)
    for i, ex in enumerate(examples):
        L = len(ex)
        input_ids[i, :L] = torch.tensor(ex.input_ids, dtype=torch.long)
        attention[i, :L] = 1
        targets[i, :L] = torch.tensor(ex.token_targets, dtype=dtype)
        mask[i, :L] = torch.tensor(ex.token_mask, dtype=torch.bool)
    return Batch(input_ids, attention, ratings, targets, mask, [ex.story_id for ex in examples])


def batch_order(n: int, batch_size: int, seed: int, epoch: int) -> list[list[int]]:
    """Seed-determined example order for one epoch, chunked into batches."""
    rng = np.random.default_rng((seed, epoch))
    perm = rng.permutation(n)
    return [perm[i : i + batch_size].tolist() for i in range(0, n, batch_size)]
