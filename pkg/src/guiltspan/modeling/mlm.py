"""Masked-language-model pretraining on the unlabeled story corpus.

Standard masking: 15% of non-marker positions are selected; of those, 80%
become the mask token, 10% a random vocabulary token, 10% stay unchanged.
Cross-entropy is computed on selected positions only. The full-scale
reference schedule (100K steps, batch 128, lr 5e-5, max length 400) is
far beyond desk scale; the same code runs both.
"""

import math
from dataclasses import dataclass, field, asdict

import torch
import torch.nn as nn

from ..corpus.types import Story
from .data import batch_order
from .encoder import EncoderConfig, TinyEncoder, build_encoder
from .tokenizer import SubwordTokenizer
from .training import TrainingDiverged, linear_warmup_decay


@dataclass
class MlmConfig:
    mask_probability: float = 0.15
    learning_rate: float = 5e-5
    batch_size: int = 128
    total_steps: int = 100_000
    warmup_ratio: float = 0.1
    max_length: int = 400
    seed: int = 0
    checkpoint_every: int = 1000
    weight_decay: float = 0.01
    encoder: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MlmConfig":
        return cls(**d)


@dataclass
class MlmEvalPoint:
    step: int
    train_loss: float
    dev_loss: float


@dataclass
class MlmResult:
    encoder: TinyEncoder
    tokenizer: SubwordTokenizer
    config: MlmConfig
    history: list[MlmEvalPoint]
    test_loss: float


class MlmHead(nn.Module):
    def __init__(self, hidden_size: int, vocab_size: int):
        super().__init__()
        self.proj = nn.Linear(hidden_size, vocab_size)

    def forward(self, states: torch.Tensor) -> torch.Tensor:
        return self.proj(states)


def _encode_corpus(tokenizer: SubwordTokenizer, stories: list[Story], max_length: int):
    encoded = []
    for story in stories:
        ids, _ = tokenizer.encode_words([t.surface for t in story.tokens], max_length)
        encoded.append(ids)
    return encoded


def _collate_ids(id_lists: list[list[int]], pad_id: int):
    T = max(len(ids) for ids in id_lists)
    out = torch.full((len(id_lists), T), pad_id, dtype=torch.long)
    mask = torch.zeros((len(id_lists), T), dtype=torch.long)
    for i, ids in enumerate(id_lists):
        out[i, : len(ids)] = torch.tensor(ids, dtype=torch.long)
        mask[i, : len(ids)] = 1
    return out, mask


def apply_mlm_masking(
    input_ids: torch.Tensor,
    attention_mask: torch.Tensor,
    tokenizer: SubwordTokenizer,
    mask_probability: float,
    generator: torch.Generator,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Returns (corrupted_ids, labels); labels are -100 off selected positions."""
    special = (
        (input_ids == tokenizer.cls_id)
        | (input_ids == tokenizer.sep_id)
        | (attention_mask == 0)
    )
    rand = torch.rand(input_ids.shape, generator=generator)
    selected = (rand < mask_probability) & ~special

    labels = torch.full_like(input_ids, -100)
    labels[selected] = input_ids[selected]

    corrupted = input_ids.clone()
    action = torch.rand(input_ids.shape, generator=generator)
    to_mask = selected & (action < 0.8)
    to_random = selected & (action >= 0.8) & (action < 0.9)
    corrupted[to_mask] = tokenizer.mask_id
    n_specials = 5
    random_ids = torch.randint(
        n_specials, tokenizer.vocab_size, input_ids.shape, generator=generator
    )
    corrupted[to_random] = random_ids[to_random]
    return corrupted, labels


def _mlm_loss(encoder, head, ids, mask, labels) -> torch.Tensor:
    states = encoder(ids, mask)
    logits = head(states)
    return nn.functional.cross_entropy(
        logits.view(-1, logits.shape[-1]), labels.view(-1), ignore_index=-100
    )


def _eval_loss(encoder, head, encoded, tokenizer, cfg, eval_seed: int) -> float:
    """Deterministic masking for comparable dev/test losses across checkpoints."""
    gen = torch.Generator().manual_seed(eval_seed)
    encoder.eval()
    losses, weights = [], []
    with torch.no_grad():
        for i in range(0, len(encoded), cfg.batch_size):
            ids, mask = _collate_ids(encoded[i : i + cfg.batch_size], tokenizer.pad_id)
            corrupted, labels = apply_mlm_masking(
                ids, mask, tokenizer, cfg.mask_probability, gen
            )
            n = int((labels != -100).sum())
            if n == 0:
                continue
            losses.append(float(_mlm_loss(encoder, head, corrupted, mask, labels)) * n)
            weights.append(n)
    encoder.train()
    if not weights:
        raise ValueError("no maskable positions in evaluation split")
    return sum(losses) / sum(weights)


def mlm_pretrain(
    train_stories: list[Story],
    dev_stories: list[Story],
    test_stories: list[Story],
    tokenizer: SubwordTokenizer,
    config: MlmConfig,
) -> MlmResult:
    if len(train_stories) < config.batch_size:
        raise ValueError(
            f"corpus smaller than one batch ({len(train_stories)} < {config.batch_size})"
        )

    enc_cfg = EncoderConfig(vocab_size=tokenizer.vocab_size, **config.encoder)
    encoder = build_encoder(enc_cfg, seed=config.seed)
    head = MlmHead(enc_cfg.hidden_size, tokenizer.vocab_size)
    encoder.train()

    train_ids = _encode_corpus(tokenizer, train_stories, config.max_length)
    dev_ids = _encode_corpus(tokenizer, dev_stories, config.max_length)
    test_ids = _encode_corpus(tokenizer, test_stories, config.max_length)

    params = list(encoder.parameters()) + list(head.parameters())
    optimizer = torch.optim.AdamW(
        params, lr=config.learning_rate, weight_decay=config.weight_decay
    )
    warmup_steps = int(round(config.warmup_ratio * config.total_steps))
    scheduler = torch.optim.lr_scheduler.LambdaLR(
        optimizer, lambda s: linear_warmup_decay(s, config.total_steps, warmup_steps)
    )
    mask_gen = torch.Generator().manual_seed(config.seed)

    history: list[MlmEvalPoint] = []
    step = 0
    last_loss = float("nan")
    epoch = 0
    while step < config.total_steps:
        for idx_batch in batch_order(len(train_ids), config.batch_size, config.seed, epoch):
            ids, mask = _collate_ids([train_ids[i] for i in idx_batch], tokenizer.pad_id)
            corrupted, labels = apply_mlm_masking(
                ids, mask, tokenizer, config.mask_probability, mask_gen
            )
            optimizer.zero_grad()
            loss = _mlm_loss(encoder, head, corrupted, mask, labels)
            if not torch.isfinite(loss):
                raise TrainingDiverged(f"non-finite MLM loss at step {step}")
            loss.backward()
            optimizer.step()
            scheduler.step()
            last_loss = float(loss.detach())
            step += 1
            if step % config.checkpoint_every == 0 and dev_ids:
                dev = _eval_loss(encoder, head, dev_ids, tokenizer, config, config.seed + 1)
                history.append(MlmEvalPoint(step=step, train_loss=last_loss, dev_loss=dev))
            if step >= config.total_steps:
                break
        epoch += 1

    if dev_ids and (not history or history[-1].step != step):
        dev = _eval_loss(encoder, head, dev_ids, tokenizer, config, config.seed + 1)
        history.append(MlmEvalPoint(step=step, train_loss=last_loss, dev_loss=dev))
    test = _eval_loss(encoder, head, test_ids, tokenizer, config, config.seed + 2) if test_ids else math.nan

    encoder.eval()
    return MlmResult(
        encoder=encoder, tokenizer=tokenizer, config=config, history=history, test_loss=test
    )
