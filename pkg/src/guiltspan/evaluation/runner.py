"""The variant runner that actually trains models for the experiment grid."""

from dataclasses import dataclass

import numpy as np
import torch

from ..annotations.types import AggregatedStory
from ..corpus.splits import split_corpus
from ..corpus.types import Story
from ..modeling import (
    EncoderConfig,
    MlmConfig,
    SubwordTokenizer,
    TinyEncoder,
    TrainConfig,
    build_dataset,
    evaluate_rating_mse,
    mlm_pretrain,
    train,
)
from .baseline import mean_baseline
from .experiment import ExperimentPlan, RunOutcome, parse_variant
from .grid import FoldOutcome, cv_grid_search


def items_from_aggregated(aggregated: list[AggregatedStory]) -> dict[str, dict]:
    """story_id -> {question -> mean rating}; the experiment's unit of account."""
    return {a.story_id: dict(a.mean_rating) for a in aggregated}


@dataclass
class _Pretrained:
    state_dict: dict
    dev_loss: float
    test_loss: float


class ModelRunner:
    """Trains the tiny (or configured) encoder per variant; caches the
    genre-pretrained trunk, which is split-independent, across repeats."""

    def __init__(
        self,
        stories: list[Story],
        aggregated: list[AggregatedStory],
        tokenizer: SubwordTokenizer | None = None,
        pretrain_stories: list[Story] | None = None,
    ):
        self.stories = {s.id: s for s in stories}
        self.aggregated = {a.story_id: a for a in aggregated}
        self.tokenizer = tokenizer or SubwordTokenizer.train(
            [[t.surface for t in s.tokens] for s in stories]
        )
        self.pretrain_stories = pretrain_stories or stories
        self._pretrained: _Pretrained | None = None

    def _get_pretrained(self, plan: ExperimentPlan) -> _Pretrained:
        if self._pretrained is None:
            tr, dev, te = split_corpus(
                self.pretrain_stories, (0.8, 0.1, 0.1), seed=plan.base_seed
            )
            cfg = MlmConfig(seed=plan.base_seed, encoder=dict(plan.encoder), **plan.pretrain)
            result = mlm_pretrain(tr, dev, te, self.tokenizer, cfg)
            self._pretrained = _Pretrained(
                state_dict={k: v.clone() for k, v in result.encoder.state_dict().items()},
                dev_loss=result.history[-1].dev_loss if result.history else float("nan"),
                test_loss=result.test_loss,
            )
        return self._pretrained

    def _fresh_encoder(self, plan: ExperimentPlan, pretrained: bool) -> TinyEncoder | None:
        if not pretrained:
            return None
        cached = self._get_pretrained(plan)
        enc = TinyEncoder(EncoderConfig(vocab_size=self.tokenizer.vocab_size, **plan.encoder))
        enc.load_state_dict(cached.state_dict)
        return enc

    def _dataset(self, ids: list[str], question: str, plan: ExperimentPlan):
        stories = [self.stories[i] for i in ids]
        aggregated = [self.aggregated[i] for i in ids]
        return build_dataset(self.tokenizer, stories, aggregated, question, plan.max_length)

    def _train_config(self, question: str, pooling: str, config: dict, plan: ExperimentPlan,
                      max_steps: int | None = None) -> TrainConfig:
        return TrainConfig(
            question=question,
            pooling=pooling,
            lam=float(config.get("lam", 0.0)),
            learning_rate=float(config.get("learning_rate", 5e-5)),
            epochs=plan.epochs,
            warmup_ratio=plan.warmup_ratio,
            batch_size=plan.batch_size,
            seed=int(config.get("seed", 0)),
            checkpoint_every=plan.checkpoint_every,
            max_steps=max_steps,
            max_length=plan.max_length,
            encoder=dict(plan.encoder),
        )

    def _oversample(self, dataset, plan: ExperimentPlan):
        if not plan.oversample_tail or len(dataset) < 4:
            return dataset
        ratings = np.array([ex.rating for ex in dataset])
        lo, hi = ratings.mean() - ratings.std(), ratings.mean() + ratings.std()
        extra = [ex for ex in dataset if ex.rating < lo or ex.rating > hi]
        return list(dataset) + extra

    def run(self, question, variant, train_ids, test_ids, items, plan, repeat) -> RunOutcome:
        spec = parse_variant(variant)
        train_targets = [items[i][question] for i in train_ids]
        test_targets = [items[i][question] for i in test_ids]
        if not train_ids or not test_ids:
            raise ValueError(f"empty split for {question}/{variant} repeat {repeat}")

        if spec["baseline"]:
            return RunOutcome(
                test_mse=mean_baseline(train_targets, test_targets),
                best_config={},
                final_steps=0,
            )

        train_set = self._oversample(self._dataset(train_ids, question, plan), plan)
        test_set = self._dataset(test_ids, question, plan)
        encoder_state = self._get_pretrained(plan) if spec["pretrain"] else None

        def trainer(sub_train, sub_val, config) -> FoldOutcome:
            tc = self._train_config(question, spec["pooling"], config, plan)
            result = train(
                sub_train, tc, self.tokenizer,
                val_dataset=sub_val,
                encoder=self._fresh_encoder(plan, spec["pretrain"]),
            )
            best = result.best_checkpoint()
            return FoldOutcome(best_step=best.step, best_val_loss=best.val_mse)

        grid = plan.grid_for(variant)
        search = cv_grid_search(
            train_set, grid, trainer,
            folds=plan.folds,
            seed=plan.base_seed + repeat,
            checkpoint_every=plan.checkpoint_every,
        )

        final_cfg = self._train_config(
            question, spec["pooling"], search.best_config, plan, max_steps=search.final_steps
        )
        result = train(
            train_set, final_cfg, self.tokenizer,
            encoder=self._fresh_encoder(plan, spec["pretrain"]),
        )
        test_mse = evaluate_rating_mse(result.model, test_set, self.tokenizer.pad_id)
        extra = {"n_train": len(train_set), "n_test": len(test_set)}
        if encoder_state is not None:
            extra["pretrain_dev_loss"] = encoder_state.dev_loss
        return RunOutcome(
            test_mse=float(test_mse),
            best_config=dict(search.best_config),
            final_steps=search.final_steps,
            extra=extra,
        )
