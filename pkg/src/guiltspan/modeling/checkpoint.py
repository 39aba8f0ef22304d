"""Checkpoint directories: parameter blob + config JSON + tokenizer snapshot."""

import json
from pathlib import Path

import torch

from ..io import write_json
from .encoder import EncoderConfig, TinyEncoder
from .model import GuiltModel
from .tokenizer import SubwordTokenizer


def save_checkpoint(
    path: str | Path,
    model: GuiltModel,
    tokenizer: SubwordTokenizer,
    config,
    extra: dict | None = None,
) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    torch.save(model.state_dict(), path / "model.pt")
    tokenizer.save(path / "tokenizer.json")
    meta = {
        "config": config.to_dict(),
        "encoder": model.encoder.cfg.to_dict(),
        "pooling": model.pooling,
        "logistic_token": model.logistic_token,
    }
    if extra:
        meta["run"] = extra
    write_json(path / "config.json", meta)
    return path


def load_checkpoint(path: str | Path) -> tuple[GuiltModel, SubwordTokenizer, dict]:
    path = Path(path)
    meta = json.loads((path / "config.json").read_text(encoding="utf-8"))
    tokenizer = SubwordTokenizer.load(path / "tokenizer.json")
    enc_cfg = EncoderConfig(**meta["encoder"])
    model = GuiltModel(
        TinyEncoder(enc_cfg),
        pooling=meta["pooling"],
        logistic_token=meta["logistic_token"],
    )
    state = torch.load(path / "model.pt", weights_only=True)
    model.load_state_dict(state)
    model.eval()
    return model, tokenizer, meta
