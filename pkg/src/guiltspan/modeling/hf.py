"""Optional pretrained-encoder backend (replication-scale runs).

Wraps a published bidirectional transformer encoder (base uncased
configuration) behind the same interface as the from-scratch encoder, so
training, prediction, and attribution run unchanged. Requires the `hf`
extra and locally available weights; desk-scale tests never touch this.
"""

from dataclasses import dataclass

import torch
import torch.nn as nn


@dataclass
class HFEncoderInfo:
    model_name: str
    hidden_size: int
    max_positions: int

    def to_dict(self) -> dict:
        return {
            "model_name": self.model_name,
            "hidden_size": self.hidden_size,
            "max_positions": self.max_positions,
        }


class PretrainedEncoder(nn.Module):
    """Adapter: exposes forward / forward_from_embeddings / embed_tokens."""

    def __init__(self, model_name: str = "bert-base-uncased"):
        super().__init__()
        try:
            from transformers import AutoModel
        except ImportError as exc:  # pragma: no cover
            raise ImportError("install the 'hf' extra for pretrained encoders") from exc
        self.inner = AutoModel.from_pretrained(model_name)
        self.cfg = HFEncoderInfo(
            model_name=model_name,
            hidden_size=self.inner.config.hidden_size,
            max_positions=self.inner.config.max_position_embeddings,
        )

    @property
    def hidden_size(self) -> int:
        return self.cfg.hidden_size

    def embed_tokens(self, input_ids: torch.Tensor) -> torch.Tensor:
        return self.inner.get_input_embeddings()(input_ids)

    def forward(self, input_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        out = self.inner(input_ids=input_ids, attention_mask=attention_mask)
        return out.last_hidden_state

    def forward_from_embeddings(
        self, token_embeds: torch.Tensor, attention_mask: torch.Tensor
    ) -> torch.Tensor:
        out = self.inner(inputs_embeds=token_embeds, attention_mask=attention_mask)
        return out.last_hidden_state


def load_pretrained_tokenizer(model_name: str = "bert-base-uncased"):
    from transformers import AutoTokenizer

    return AutoTokenizer.from_pretrained(model_name)
