"""Path-integral token attributions for the rating output.

Attribution of input x against baseline x' along the straight-line path,
with gradients averaged at midpoint Riemann nodes:

    attr_i = (x - x')_i * (1/steps) * sum_k dF/dx_i at x' + a_k (x - x')

summed over embedding dimensions per piece, then over pieces per word.
The baseline replaces every non-marker piece with the padding embedding
and keeps the start/end markers, so sequence length and marker structure
are preserved and markers receive zero attribution by construction.
The completeness gap |sum attr - (F(x) - F(x'))| is recorded on every run.
"""

from dataclasses import dataclass, field

import torch

from ..corpus.types import Story
from ..modeling.data import encode_story
from ..modeling.model import GuiltModel
from ..modeling.tokenizer import SubwordTokenizer


@dataclass
class AttributionResult:
    story_id: str
    word_scores: list[float]        # signed, aligned with Story.tokens (prefix)
    words: list[str]
    rating: float
    baseline_rating: float
    completeness_delta: float
    steps: int
    piece_scores: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "story_id": self.story_id,
            "word_scores": list(self.word_scores),
            "words": list(self.words),
            "rating": self.rating,
            "baseline_rating": self.baseline_rating,
            "completeness_delta": self.completeness_delta,
            "steps": self.steps,
        }


def integrate_gradients_fn(f, x: torch.Tensor, baseline: torch.Tensor, steps: int) -> torch.Tensor:
    """Generic midpoint-rule path integral: per-element attributions for a
    scalar-valued differentiable f. Shapes of x and baseline must match."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if x.shape != baseline.shape:
        raise ValueError("input and baseline shapes differ")
    delta = x - baseline
    total = torch.zeros_like(x)
    for k in range(steps):
        alpha = (k + 0.5) / steps
        point = (baseline + alpha * delta).detach().requires_grad_(True)
        value = f(point)
        if value.numel() != 1:
            raise ValueError("attribution target must be scalar")
        (grad,) = torch.autograd.grad(value, point)
        total = total + grad
    return delta * total / steps


def integrated_gradients(
    model: GuiltModel,
    tokenizer: SubwordTokenizer,
    story: Story,
    steps: int = 64,
    max_length: int = 400,
) -> AttributionResult:
    """Word-level attributions of the scalar rating for one story."""
    input_ids, word_ids = encode_story(tokenizer, story, max_length)
    ids = torch.tensor([input_ids], dtype=torch.long)
    mask = torch.ones_like(ids)

    model.eval()
    with torch.no_grad():
        embeds = model.encoder.embed_tokens(ids)
        pad_embed = model.encoder.embed_tokens(
            torch.full_like(ids, tokenizer.pad_id)
        )
    keep = torch.tensor(
        [[wid is None for wid in word_ids]], dtype=torch.bool
    ).unsqueeze(-1)
    baseline = torch.where(keep, embeds, pad_embed)

    def f(point):
        return model.rating_from_embeddings(point, mask).squeeze()

    attr = integrate_gradients_fn(f, embeds, baseline, steps)
    piece_scores = attr.sum(dim=-1)[0]

    with torch.no_grad():
        rating = float(model.rating_from_embeddings(embeds, mask))
        baseline_rating = float(model.rating_from_embeddings(baseline, mask))
    completeness_delta = abs(float(piece_scores.sum()) - (rating - baseline_rating))

    n_words = 1 + max((w for w in word_ids if w is not None), default=-1)
    word_scores = [0.0] * n_words
    for pos, wid in enumerate(word_ids):
        if wid is not None:
            word_scores[wid] += float(piece_scores[pos])

    return AttributionResult(
        story_id=story.id,
        word_scores=word_scores,
        words=[t.surface for t in story.tokens[:n_words]],
        rating=rating,
        baseline_rating=baseline_rating,
        completeness_delta=completeness_delta,
        steps=steps,
        piece_scores=[float(s) for s in piece_scores],
    )
