"""Inference: scalar rating plus per-word-token scores for a story."""

import torch

from ..corpus.types import Story
from .data import encode_story
from .model import GuiltModel
from .tokenizer import SubwordTokenizer


def predict(
    model: GuiltModel,
    tokenizer: SubwordTokenizer,
    story: Story,
    max_length: int = 400,
) -> tuple[float, list[float]]:
    """Returns (rating, word_scores); word score = mean of its piece scores.

    Words truncated away by the max-length budget get no score; the score
    vector covers exactly the words that fed the model.
    """
    if not story.body.strip() or not story.tokens:
        raise ValueError("cannot predict on empty text")
    input_ids, word_ids = encode_story(tokenizer, story, max_length)
    ids = torch.tensor([input_ids], dtype=torch.long)
    mask = torch.ones_like(ids)
    model.eval()
    with torch.no_grad():
        rating, token_scores = model(ids, mask)
    scores = token_scores[0].tolist()

    n_words = 1 + max(w for w in word_ids if w is not None)
    sums = [0.0] * n_words
    counts = [0] * n_words
    for pos, wid in enumerate(word_ids):
        if wid is not None:
            sums[wid] += scores[pos]
            counts[wid] += 1
    word_scores = [s / c for s, c in zip(sums, counts)]
    return float(rating[0]), word_scores
