"""Bidirectional transformer encoder, sized for desk-scale experiments.

Maps an input sequence (start marker, pieces..., end marker) to one output
vector per position. Exposes a forward pass from raw token embeddings so
path-integral attribution can interpolate inputs in embedding space.
"""

from dataclasses import dataclass, asdict

import torch
import torch.nn as nn


@dataclass
class EncoderConfig:
    vocab_size: int
    hidden_size: int = 64
    num_layers: int = 2
    num_heads: int = 4
    ff_size: int = 128
    max_positions: int = 512
    dropout: float = 0.0  # keep 0 for bit-reproducible runs

    def to_dict(self) -> dict:
        return asdict(self)


class TransformerBlock(nn.Module):
    def __init__(self, cfg: EncoderConfig):
        super().__init__()
        self.ln1 = nn.LayerNorm(cfg.hidden_size)
        self.attn = nn.MultiheadAttention(
            cfg.hidden_size, cfg.num_heads, dropout=cfg.dropout, batch_first=True
        )
        self.ln2 = nn.LayerNorm(cfg.hidden_size)
        self.mlp = nn.Sequential(
            nn.Linear(cfg.hidden_size, cfg.ff_size),
            nn.GELU(),
            nn.Linear(cfg.ff_size, cfg.hidden_size),
        )
        self.drop = nn.Dropout(cfg.dropout)

    def forward(self, x: torch.Tensor, key_padding_mask: torch.Tensor) -> torch.Tensor:
        h = self.ln1(x)
        attn_out, _ = self.attn(h, h, h, key_padding_mask=key_padding_mask, need_weights=False)
        x = x + self.drop(attn_out)
        x = x + self.drop(self.mlp(self.ln2(x)))
        return x


class TinyEncoder(nn.Module):
    """Pre-LN transformer encoder trained from scratch."""

    def __init__(self, cfg: EncoderConfig):
        super().__init__()
        self.cfg = cfg
        self.token_embedding = nn.Embedding(cfg.vocab_size, cfg.hidden_size)
        self.position_embedding = nn.Embedding(cfg.max_positions, cfg.hidden_size)
        self.blocks = nn.ModuleList(TransformerBlock(cfg) for _ in range(cfg.num_layers))
        self.final_ln = nn.LayerNorm(cfg.hidden_size)
        self.drop = nn.Dropout(cfg.dropout)

    @property
    def hidden_size(self) -> int:
        return self.cfg.hidden_size

    def embed_tokens(self, input_ids: torch.Tensor) -> torch.Tensor:
        return self.token_embedding(input_ids)

    def forward_from_embeddings(
        self, token_embeds: torch.Tensor, attention_mask: torch.Tensor
    ) -> torch.Tensor:
        """token_embeds: [B, T, d] raw token embeddings; mask: [B, T] 1=real."""
        T = token_embeds.shape[1]
        positions = torch.arange(T, device=token_embeds.device)
        x = token_embeds + self.position_embedding(positions)[None, :, :]
        x = self.drop(x)
        key_padding_mask = attention_mask == 0
        for block in self.blocks:
            x = block(x, key_padding_mask)
        return self.final_ln(x)

    def forward(self, input_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        return self.forward_from_embeddings(self.embed_tokens(input_ids), attention_mask)


def build_encoder(cfg: EncoderConfig, seed: int = 0) -> TinyEncoder:
    torch.manual_seed(seed)
    return TinyEncoder(cfg)
