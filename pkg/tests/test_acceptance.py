"""Acceptance suite: one test per acceptance criterion, stated tolerances.

Each criterion prints one `[ACCEPTANCE] <name>: PASS` line on success (run
pytest with -s to see them); a failure shows up as a normal pytest failure.
Criteria that replicate statistics on the released human-annotation corpus
need that data locally: set GUILTSPAN_RELEASED_DATA to a directory
containing stories.jsonl (Story schema) and sessions.jsonl (Session
schema) to run them; they skip otherwise.
"""

import itertools
import math
import os
from pathlib import Path

import numpy as np
import pytest
import torch
from scipy.stats import rankdata

from guiltspan.annotations import aggregate_corpus, exclude_participants, exclude_stories
from guiltspan.corpus import filter_archive
from guiltspan.corpus.splits import split_corpus
from guiltspan.evaluation import (
    ExperimentPlan,
    RunOutcome,
    bootstrap_ci,
    mean_baseline,
    repeat_split,
    run_experiment,
    wilcoxon_signed_rank,
)
from guiltspan.fixtures import generate_fixture
from guiltspan.modeling import (
    EncoderConfig,
    SubwordTokenizer,
    TrainConfig,
    build_dataset,
    build_model,
    collate,
    evaluate_rating_mse,
    loss_joint,
    loss_rating,
    loss_token,
    predict,
    train,
)
from guiltspan.stats import (
    chance_highlight_rate,
    highlight_frequency_correlation,
    highlight_units,
    krippendorff_alpha,
    mean_story_mse,
    per_story_mses,
    ratings_by_story,
    shuffled_mse_baseline,
    shuffled_per_story_mses,
    welch_t_test,
    word_stats,
)
from guiltspan.annotations.types import Question

TINY = {"hidden_size": 64, "num_layers": 2, "num_heads": 4, "ff_size": 128}

RELEASED_ENV = "GUILTSPAN_RELEASED_DATA"


def _passed(name: str) -> None:
    print(f"\n[ACCEPTANCE] {name}: PASS")


def _released_dir():
    path = os.environ.get(RELEASED_ENV)
    if not path:
        pytest.skip(
            f"released corpus not available in this environment; set {RELEASED_ENV} "
            "to a directory with stories.jsonl and sessions.jsonl to run this criterion"
        )
    return Path(path)


@pytest.fixture(scope="module")
def released_corpus():
    from guiltspan.annotations import Session
    from guiltspan.corpus.types import Story
    from guiltspan.io import read_jsonl

    root = _released_dir()
    stories = [Story.from_dict(d) for d in read_jsonl(root / "stories.jsonl")]
    sessions = [Session.from_dict(d) for d in read_jsonl(root / "sessions.jsonl")]
    kept_sessions, _ = exclude_participants(sessions)
    annotations = [a for s in kept_sessions for a in s.annotations]
    kept_ids, _ = exclude_stories([s.id for s in stories], annotations)
    by_id = {s.id: s for s in stories}
    return [by_id[i] for i in kept_ids], annotations


class TestCriterionReleasedCorpusStatistics:
    """Corpus statistics on the released data (skipped without the data)."""

    def test_released_corpus_statistics(self, released_corpus):
        stories, annotations = released_corpus
        assert len(stories) == 1821

        targets = {
            Question.READER_PERCEPTION: (0.0313, 0.0353, 0.16),
            Question.AUTHOR_BELIEF: (0.0410, 0.0443, 0.08),
        }
        for q, (mse_target, shuffled_target, alpha_target) in targets.items():
            by_story = {
                k: v for k, v in ratings_by_story(annotations, q).items() if len(v) >= 2
            }
            mse = mean_story_mse(by_story)
            assert mse == pytest.approx(mse_target, abs=0.002)

            reps = shuffled_mse_baseline(by_story, seed=0, reps=20)
            assert float(reps.mean()) == pytest.approx(shuffled_target, abs=0.0015)

            welch = welch_t_test(
                per_story_mses(by_story), shuffled_per_story_mses(by_story, seed=1)
            )
            assert welch.p < 0.0001

            alpha = krippendorff_alpha(highlight_units(stories, annotations, q))
            assert alpha == pytest.approx(alpha_target, abs=0.02)

        rate = chance_highlight_rate(stories, annotations)
        assert rate == pytest.approx(0.1488, abs=0.005)

        ws = word_stats(stories, annotations, min_freq=25)
        r = highlight_frequency_correlation(ws)
        assert r == pytest.approx(0.97, abs=0.01)
        _passed("released corpus statistics")


class TestCriterionReleasedMeanBaseline:
    def test_mean_baseline_twenty_splits(self, released_corpus):
        stories, annotations = released_corpus
        aggregated = aggregate_corpus(stories, annotations)
        targets = {"reader_perception": 0.0119, "author_belief": 0.0121}
        plan = ExperimentPlan(n_repeats=20)
        for question, expected in targets.items():
            items = {
                a.story_id: a.mean_rating[question]
                for a in aggregated
                if question in a.mean_rating
            }
            ids = sorted(items)
            mses = []
            for repeat in range(20):
                train_ids, test_ids = repeat_split(plan, ids, repeat)
                mses.append(
                    mean_baseline([items[i] for i in train_ids], [items[i] for i in test_ids])
                )
            assert float(np.mean(mses)) == pytest.approx(expected, abs=0.0015)
        _passed("released mean baseline")


class TestCriterionLossSuite:
    """Objective implementations vs loop oracles; exact degeneracy; gradients."""

    def test_loss_loop_oracles(self):
        rng = np.random.default_rng(0)
        preds = rng.random(23)
        targets = rng.random(23)
        got = float(loss_rating(torch.tensor(preds), torch.tensor(targets)))
        want = sum(0.5 * (p - t) ** 2 for p, t in zip(preds, targets)) / len(preds)
        assert got == pytest.approx(want, abs=1e-9)

        tp = rng.random((6, 11))
        tt = rng.random((6, 11))
        mask = rng.random((6, 11)) < 0.6
        mask[:, 0] = True
        got_t = float(loss_token(torch.tensor(tp), torch.tensor(tt), torch.tensor(mask)))
        per_ex = []
        for p_row, t_row, m_row in zip(tp, tt, mask):
            vals = [0.5 * (p - t) ** 2 for p, t, m in zip(p_row, t_row, m_row) if m]
            per_ex.append(sum(vals) / len(vals))
        assert got_t == pytest.approx(sum(per_ex) / len(per_ex), abs=1e-9)

        j_r = torch.tensor(float(rng.random()), dtype=torch.float64)
        j_t = torch.tensor(float(rng.random()), dtype=torch.float64)
        assert float(loss_joint(j_r, j_t, 0.0)) == float(j_r)  # exact degeneracy
        for lam in (1.0, 2.0):
            assert float(loss_joint(j_r, j_t, lam)) == pytest.approx(
                float(j_r) + lam * float(j_t), abs=1e-12
            )
        _passed("loss suite: loop oracles and lambda degeneracy")

    def test_gradient_check_tiny_encoder(self, fixture_dataset, fixture_tokenizer):
        model = build_model(
            EncoderConfig(vocab_size=fixture_tokenizer.vocab_size, **TINY), seed=11
        ).double()
        model.train()
        batch = collate(fixture_dataset[:3], fixture_tokenizer.pad_id, dtype=torch.float64)

        def loss_value():
            rating, tokens = model(batch.input_ids, batch.attention_mask)
            return loss_joint(
                loss_rating(rating, batch.ratings),
                loss_token(tokens, batch.token_targets, batch.token_mask),
                1.0,
            )

        model.zero_grad()
        loss_value().backward()
        coords = [
            (model.rating_head.weight, (0, 3)),
            (model.rating_head.bias, (0,)),
            (model.token_head.weight, (0, 17)),
            (model.token_head.bias, (0,)),
            (model.encoder.blocks[0].attn.in_proj_weight, (10, 20)),
            (model.encoder.blocks[1].mlp[0].weight, (5, 12)),
            (model.encoder.token_embedding.weight, (int(batch.input_ids[0, 2]), 7)),
        ]
        h = 1e-6
        for tensor, idx in coords:
            analytic = tensor.grad[idx].item()
            with torch.no_grad():
                orig = tensor[idx].item()
                tensor[idx] = orig + h
                lp = loss_value().item()
                tensor[idx] = orig - h
                lm = loss_value().item()
                tensor[idx] = orig
            fd = (lp - lm) / (2 * h)
            rel = abs(fd - analytic) / max(abs(fd), abs(analytic), 1e-10)
            assert rel <= 1e-4
        _passed("loss suite: gradient check (rel err <= 1e-4)")


class TestCriterionIntegratedGradients:
    def test_linear_oracle_exact(self):
        from guiltspan.attribution import integrate_gradients_fn

        torch.manual_seed(0)
        w = torch.randn(32, dtype=torch.float64)
        x = torch.randn(32, dtype=torch.float64)
        for steps in (1, 7, 64):
            attr = integrate_gradients_fn(
                lambda p: (w * p).sum(), x, torch.zeros_like(x), steps
            )
            assert torch.allclose(attr, w * x, atol=1e-9)
        _passed("integrated gradients: linear oracle (1e-9)")

    def test_zero_path(self):
        from guiltspan.attribution import integrate_gradients_fn

        x = torch.randn(12, dtype=torch.float64)
        attr = integrate_gradients_fn(lambda p: (p**3).sum(), x, x.clone(), steps=16)
        assert torch.allclose(attr, torch.zeros_like(x))
        _passed("integrated gradients: zero path")

    def test_completeness_at_512_steps(self, fixture_pipeline, fixture_dataset, fixture_tokenizer):
        from guiltspan.attribution import integrated_gradients

        stories, _, _, _ = fixture_pipeline
        config = TrainConfig(lam=1.0, learning_rate=3e-4, epochs=3, batch_size=8,
                             seed=5, checkpoint_every=1000, encoder=TINY)
        result = train(fixture_dataset, config, fixture_tokenizer)
        for story in stories[:3]:
            res = integrated_gradients(result.model, fixture_tokenizer, story, steps=512)
            budget = 1e-3 * abs(res.rating - res.baseline_rating)
            assert res.completeness_delta <= budget
        _passed("integrated gradients: completeness delta <= 1e-3 at 512 steps")


@pytest.fixture(scope="module")
def planted_setup():
    archive, sessions, truths = generate_fixture()
    stories, _ = filter_archive(archive)
    kept, _ = exclude_participants(sessions)
    annotations = [a for s in kept for a in s.annotations]
    aggregated = aggregate_corpus(stories, annotations)
    tokenizer = SubwordTokenizer.train([[t.surface for t in s.tokens] for s in stories])
    truth_by = {t.story_id: t for t in truths}
    return stories, aggregated, tokenizer, truth_by


class TestCriterionPlantedSignal:
    """Joint-objective advantage on the bundled fixture, 10 training seeds.

    Protocol (frozen): from-scratch tiny encoder; canonical 80/20
    train/test split of the fixture (split seed 0); per training seed s in
    0..9 both loss-ratio settings run with identical config (mean pooling,
    lr 1e-3, 60 epochs, batch 8). r is the Pearson correlation between the
    joint model's word scores and the planted graded rationale targets
    over the whole fixture.
    """

    EPOCHS = 60
    LR = 1e-3

    def _run(self, setup, seed, lam):
        stories, aggregated, tokenizer, truth_by = setup
        train_stories, test_stories = split_corpus(stories, (0.8, 0.2), seed=0)
        ds_train = build_dataset(tokenizer, train_stories, aggregated, "reader_perception")
        ds_test = build_dataset(tokenizer, test_stories, aggregated, "reader_perception")
        config = TrainConfig(lam=lam, learning_rate=self.LR, epochs=self.EPOCHS,
                             batch_size=8, seed=seed, checkpoint_every=100_000)
        result = train(ds_train, config, tokenizer)
        mse = evaluate_rating_mse(result.model, ds_test, tokenizer.pad_id)
        return result.model, mse

    def _rationale_r(self, setup, model):
        stories, _, tokenizer, truth_by = setup
        scores, labels = [], []
        for story in stories:
            _, word_scores = predict(model, tokenizer, story)
            planted = truth_by[story.id].token_targets(len(story.tokens))
            scores += word_scores
            labels += planted[: len(word_scores)]
        return float(np.corrcoef(scores, labels)[0, 1])

    def test_planted_signal_training(self, planted_setup):
        wins = 0
        correlations = []
        for seed in range(10):
            joint_model, joint_mse = self._run(planted_setup, seed, lam=1.0)
            _, plain_mse = self._run(planted_setup, seed, lam=0.0)
            wins += joint_mse < plain_mse
            correlations.append(self._rationale_r(planted_setup, joint_model))
        print(f"\n[planted-signal] joint-vs-plain wins: {wins}/10, "
              f"rationale r range: {min(correlations):.3f}-{max(correlations):.3f}")
        assert min(correlations) > 0.5, "token-score/rationale correlation below 0.5"
        assert wins >= 8, (
            f"joint objective beat lam=0 in only {wins}/10 seeds; see the decisions "
            "ledger entry on this criterion for the measured analysis"
        )
        _passed("planted-signal training")


def _enumeration_p(a, b):
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    d = d[d != 0]
    ranks = rankdata(np.abs(d))
    w_obs = ranks[d > 0].sum()
    hits = 0
    for bits in itertools.product((False, True), repeat=len(d)):
        w = sum(r for r, bit in zip(ranks, bits) if bit)
        if w <= w_obs + 1e-9:
            hits += 1
    return hits / 2 ** len(d)


class TestCriterionEvalHarness:
    def test_wilcoxon_matches_enumeration(self):
        rng = np.random.default_rng(7)
        for n in range(5, 13):
            for trial in range(10):
                a = rng.normal(0, 1, n)
                b = a + rng.normal(0.15, 0.6, n)
                if trial % 3 == 0 and n >= 6:
                    b[1] = a[1] - abs(a[0] - b[0])  # force a tie in |d|
                res = wilcoxon_signed_rank(a, b)
                assert res.method == "exact"
                assert res.p == pytest.approx(_enumeration_p(a, b), abs=1e-12)
        _passed("eval harness: Wilcoxon exact matches enumeration (n <= 12)")

    def test_bootstrap_coverage(self):
        rng = np.random.default_rng(3)
        sims = 1000
        covered = 0
        for s in range(sims):
            sample = rng.normal(0.5, 0.1, 20)
            lo, hi = bootstrap_ci(sample, level=0.95, resamples=1000, seed=s)
            covered += lo <= 0.5 <= hi
        coverage = covered / sims
        assert 0.93 <= coverage <= 0.97
        _passed(f"eval harness: bootstrap coverage {coverage:.3f} in [0.93, 0.97]")

    def test_split_integrity_and_determinism(self, tmp_path):
        plan = ExperimentPlan(n_repeats=20, bootstrap_resamples=500)
        rng = np.random.default_rng(0)
        items = {
            f"s{i:03d}": {"reader_perception": float(rng.random()),
                          "author_belief": float(rng.random())}
            for i in range(60)
        }
        ids = sorted(items)
        for repeat in range(20):
            train_ids, test_ids = repeat_split(plan, ids, repeat)
            assert not (set(train_ids) & set(test_ids))
            assert sorted(train_ids + test_ids) == ids
            assert abs(len(test_ids) - 0.15 * len(ids)) <= 1

        class SeededRunner:
            def run(self, question, variant, train_ids, test_ids, items, plan, repeat):
                r = np.random.default_rng(abs(hash((question, variant, repeat))) % 2**32)
                return RunOutcome(test_mse=float(r.random()), best_config={}, final_steps=100)

        rep1 = run_experiment(plan, items, SeededRunner(), tmp_path / "a")
        rep2 = run_experiment(plan, items, SeededRunner(), tmp_path / "b")
        assert rep1.to_dict() == rep2.to_dict()
        _passed("eval harness: split integrity + determinism over 20 seeded runs")


@pytest.mark.skip(
    reason="stretch target (documented, not CI): full-scale replication needs the "
    "published pretrained base encoder weights and GPU-days; see README"
)
class TestStretchFullScaleReplication:
    def test_table_ordering_and_pretraining_direction(self):
        raise NotImplementedError
