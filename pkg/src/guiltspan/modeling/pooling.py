"""Sequence pooling: start-marker vector or mean over all real positions."""

import torch

POOLING_MODES = ("cls", "mean")


def pool(states: torch.Tensor, mode: str, attention_mask: torch.Tensor | None = None) -> torch.Tensor:
    """states: [B, T, d] -> [B, d].

    "cls" returns position 0; "mean" averages every real position including
    the start/end markers (padding excluded via the mask).
    """
    if states.numel() == 0:
        raise ValueError("empty states")
    mode = mode.lower()
    if mode == "cls":
        return states[:, 0, :]
    if mode == "mean":
        if attention_mask is None:
            return states.mean(dim=1)
        mask = attention_mask.to(states.dtype).unsqueeze(-1)
        return (states * mask).sum(dim=1) / mask.sum(dim=1)
    raise ValueError(f"unknown pooling mode {mode!r}")
