"""Encoder plus the two linear regression heads."""

import torch
import torch.nn as nn

from .encoder import EncoderConfig, TinyEncoder
from .pooling import pool


class GuiltModel(nn.Module):
    """Shared encoder trunk; scalar rating head and per-position token head.

    The token head is linear by default; logistic mode squashes its output
    through a sigmoid (kept for comparison, linear performs better).
    """

    def __init__(self, encoder: TinyEncoder, pooling: str = "mean", logistic_token: bool = False):
        super().__init__()
        self.encoder = encoder
        self.pooling = pooling.lower()
        self.logistic_token = logistic_token
        d = encoder.hidden_size
        self.rating_head = nn.Linear(d, 1)
        self.token_head = nn.Linear(d, 1)

    def forward_states(
        self, states: torch.Tensor, attention_mask: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor]:
        pooled = pool(states, self.pooling, attention_mask)
        rating = self.rating_head(pooled).squeeze(-1)
        token_scores = self.token_head(states).squeeze(-1)
        if self.logistic_token:
            token_scores = torch.sigmoid(token_scores)
        return rating, token_scores

    def forward(
        self, input_ids: torch.Tensor, attention_mask: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor]:
        states = self.encoder(input_ids, attention_mask)
        return self.forward_states(states, attention_mask)

    def forward_from_embeddings(
        self, token_embeds: torch.Tensor, attention_mask: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor]:
        states = self.encoder.forward_from_embeddings(token_embeds, attention_mask)
        return self.forward_states(states, attention_mask)

    def rating_from_embeddings(
        self, token_embeds: torch.Tensor, attention_mask: torch.Tensor
    ) -> torch.Tensor:
        """Attribution target: the scalar rating as a function of embeddings."""
        return self.forward_from_embeddings(token_embeds, attention_mask)[0]


def build_model(
    encoder_cfg: EncoderConfig,
    pooling: str = "mean",
    logistic_token: bool = False,
    seed: int = 0,
    encoder: TinyEncoder | None = None,
) -> GuiltModel:
    """Seeded construction; heads are seeded even when the trunk is reused."""
    torch.manual_seed(seed)
    if encoder is None:
        encoder = TinyEncoder(encoder_cfg)
    return GuiltModel(encoder, pooling=pooling, logistic_token=logistic_token)
