"""Fine-tuning loop for the joint rating + rationale objective.

One optimization stream; batches arrive in a seed-determined order, so a
fixed (dataset, config) pair reproduces the same run. Checkpoints are
taken every `checkpoint_every` steps, each with a validation rating MSE
when a validation set is given. Validation uses plain MSE (no 1/2):
that is the reported evaluation metric and it is comparable across
loss-ratio settings.
"""

import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import torch

from .data import Batch, TrainingExample, batch_order, collate
from .encoder import EncoderConfig, TinyEncoder
from .losses import loss_joint, loss_rating, loss_token
from .model import GuiltModel, build_model
from .tokenizer import SubwordTokenizer


class TrainingDiverged(RuntimeError):
    """Loss went NaN/inf; carries the step and last finite loss."""


@dataclass
class TrainConfig:
    question: str = "reader_perception"
    pooling: str = "mean"
    lam: float = 0.0  # token-loss ratio; 0 disables token supervision
    learning_rate: float = 5e-5
    epochs: int = 5
    warmup_ratio: float = 0.1
    batch_size: int = 16
    seed: int = 0
    checkpoint_every: int = 100
    max_steps: int | None = None  # when set, stops after exactly this many steps
    weight_decay: float = 0.01
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    max_length: int = 400
    logistic_token: bool = False
    encoder: dict = field(default_factory=dict)  # EncoderConfig overrides

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(**d)


@dataclass
class CheckpointRecord:
    step: int
    train_loss: float
    val_mse: float | None


@dataclass
class TrainResult:
    model: GuiltModel
    tokenizer: SubwordTokenizer
    config: TrainConfig
    checkpoints: list[CheckpointRecord]
    steps: int
    final_train_loss: float

    def best_checkpoint(self) -> CheckpointRecord:
        with_val = [c for c in self.checkpoints if c.val_mse is not None]
        if not with_val:
            raise ValueError("no checkpoints carry a validation score")
        return min(with_val, key=lambda c: (c.val_mse, c.step))


def linear_warmup_decay(step: int, total_steps: int, warmup_steps: int) -> float:
    if warmup_steps > 0 and step < warmup_steps:
        return step / warmup_steps
    if total_steps <= warmup_steps:
        return 1.0
    return max(0.0, (total_steps - step) / (total_steps - warmup_steps))


def evaluate_rating_mse(model: GuiltModel, dataset: list[TrainingExample], pad_id: int,
                        batch_size: int = 32) -> float:
    model.eval()
    errors = []
    with torch.no_grad():
        for i in range(0, len(dataset), batch_size):
            batch = collate(dataset[i : i + batch_size], pad_id)
            rating, _ = model(batch.input_ids, batch.attention_mask)
            errors.append((rating - batch.ratings) ** 2)
    model.train()
    return float(torch.cat(errors).mean())


def _compute_loss(model: GuiltModel, batch: Batch, lam: float) -> torch.Tensor:
    rating, token_scores = model(batch.input_ids, batch.attention_mask)
    j_r = loss_rating(rating, batch.ratings)
    if lam == 0:
        return loss_joint(j_r, j_r, 0.0)
    j_t = loss_token(token_scores, batch.token_targets, batch.token_mask)
    return loss_joint(j_r, j_t, lam)


def evaluate_joint_loss(
    model: GuiltModel,
    dataset: list[TrainingExample],
    lam: float,
    pad_id: int,
    batch_size: int = 32,
) -> float:
    """Training objective averaged over a dataset (diagnostics, not the metric)."""
    model.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        for i in range(0, len(dataset), batch_size):
            chunk = dataset[i : i + batch_size]
            total += float(_compute_loss(model, collate(chunk, pad_id), lam)) * len(chunk)
            count += len(chunk)
    model.train()
    return total / count


def train(
    dataset: list[TrainingExample],
    config: TrainConfig,
    tokenizer: SubwordTokenizer,
    val_dataset: list[TrainingExample] | None = None,
    encoder: TinyEncoder | None = None,
    checkpoint_dir: str | Path | None = None,
) -> TrainResult:
    """Optimize the joint objective; returns the final model plus the
    checkpoint trace. Pass a pretrained `encoder` to fine-tune it."""
    if not dataset:
        raise ValueError("empty dataset")

    enc_cfg = EncoderConfig(vocab_size=tokenizer.vocab_size, **config.encoder)
    model = build_model(
        enc_cfg,
        pooling=config.pooling,
        logistic_token=config.logistic_token,
        seed=config.seed,
        encoder=encoder,
    )
    model.train()

    steps_per_epoch = math.ceil(len(dataset) / config.batch_size)
    total_steps = config.max_steps if config.max_steps is not None else steps_per_epoch * config.epochs
    warmup_steps = int(round(config.warmup_ratio * total_steps))
    optimizer = torch.optim.AdamW(
        model.parameters(),
        lr=config.learning_rate,
        weight_decay=config.weight_decay,
        betas=(config.adam_beta1, config.adam_beta2),
        eps=config.adam_eps,
    )
    scheduler = torch.optim.lr_scheduler.LambdaLR(
        optimizer, lambda s: linear_warmup_decay(s, total_steps, warmup_steps)
    )

    checkpoints: list[CheckpointRecord] = []
    step = 0
    last_loss = float("nan")
    epoch = 0

    def take_checkpoint() -> None:
        val = (
            evaluate_rating_mse(model, val_dataset, tokenizer.pad_id)
            if val_dataset
            else None
        )
        checkpoints.append(CheckpointRecord(step=step, train_loss=last_loss, val_mse=val))
        if checkpoint_dir is not None:
            from .checkpoint import save_checkpoint

            save_checkpoint(
                Path(checkpoint_dir) / f"step-{step:06d}", model, tokenizer, config,
                extra={"step": step, "train_loss": last_loss, "val_mse": val},
            )

    done = False
    while not done:
        for idx_batch in batch_order(len(dataset), config.batch_size, config.seed, epoch):
            batch = collate([dataset[i] for i in idx_batch], tokenizer.pad_id)
            optimizer.zero_grad()
            loss = _compute_loss(model, batch, config.lam)
            if not torch.isfinite(loss):
                raise TrainingDiverged(
                    f"non-finite loss at step {step} (last finite: {last_loss})"
                )
            loss.backward()
            optimizer.step()
            scheduler.step()
            last_loss = float(loss.detach())
            step += 1
            if step % config.checkpoint_every == 0:
                take_checkpoint()
            if step >= total_steps:
                done = True
                break
        epoch += 1
        if config.max_steps is None and epoch >= config.epochs:
            done = True

    if not checkpoints or checkpoints[-1].step != step:
        take_checkpoint()

    return TrainResult(
        model=model,
        tokenizer=tokenizer,
        config=config,
        checkpoints=checkpoints,
        steps=step,
        final_train_loss=last_loss,
    )
