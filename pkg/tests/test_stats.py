import math
from collections import Counter

import numpy as np
import pytest
from scipy import stats as sps

from guiltspan.annotations import Annotation, Highlight, Question
from guiltspan.corpus import tokenize_with_offsets
from guiltspan.corpus.types import Story
from guiltspan.stats import (
    chance_highlight_rate,
    highlight_frequency_correlation,
    highlight_units,
    krippendorff_alpha,
    majority_agreement_test,
    mean_story_mse,
    shuffle_ratings,
    shuffled_mse_baseline,
    story_mse,
    welch_t_test,
    word_stats,
)
from guiltspan.annotations.aggregate import aggregate


def make_story(sid, body):
    return Story(
        id=sid,
        title=sid,
        body=body,
        word_count=len(body.split()),
        stem_hits=4,
        tokens=tokenize_with_offsets(body),
    )


def ann(story_id, q, slider=None, da=False, highlights=(), pid="p1"):
    return Annotation(
        story_id=story_id,
        question=q,
        slider=slider,
        doesnt_apply=da,
        highlights=[Highlight(a, b) for a, b in highlights],
        participant_id=pid,
        session_id="x",
    )


class TestStoryMse:
    def test_hand_arithmetic(self):
        assert story_mse([0.4, 0.6]) == pytest.approx(0.01)

    def test_identical(self):
        assert story_mse([0.7, 0.7, 0.7]) == 0.0

    def test_requires_two(self):
        with pytest.raises(ValueError):
            story_mse([0.5])

    def test_translation_invariant(self):
        base = [0.1, 0.4, 0.2, 0.35]
        shifted = [r + 0.3 for r in base]
        assert story_mse(base) == pytest.approx(story_mse(shifted), abs=1e-12)


class TestShuffledBaseline:
    def test_identical_ratings_zero(self):
        by_story = {"a": [0.5, 0.5], "b": [0.5, 0.5, 0.5]}
        reps = shuffled_mse_baseline(by_story, seed=0, reps=5)
        assert np.all(reps == 0.0)

    def test_multiset_and_counts_preserved(self):
        rng = np.random.default_rng(0)
        by_story = {f"s{i}": rng.random(rng.integers(2, 8)).tolist() for i in range(10)}
        shuffled = shuffle_ratings(by_story, np.random.default_rng(1))
        assert sorted(len(v) for v in shuffled.values()) == sorted(len(v) for v in by_story.values())
        assert {k: len(v) for k, v in shuffled.items()} == {k: len(v) for k, v in by_story.items()}
        pooled_a = sorted(x for v in by_story.values() for x in v)
        pooled_b = sorted(x for v in shuffled.values() for x in v)
        assert pooled_a == pytest.approx(pooled_b, abs=0)

    def test_deterministic_under_seed(self):
        by_story = {"a": [0.1, 0.9], "b": [0.3, 0.4, 0.8]}
        r1 = shuffled_mse_baseline(by_story, seed=7, reps=4)
        r2 = shuffled_mse_baseline(by_story, seed=7, reps=4)
        assert np.array_equal(r1, r2)

    def test_shuffling_raises_mse_when_stories_separated(self):
        # Stories tightly clustered at different levels: within-story variance
        # is tiny, so mixing across stories must raise the mean story MSE.
        by_story = {
            "low": [0.1, 0.12, 0.11, 0.1],
            "mid": [0.5, 0.52, 0.49, 0.51],
            "high": [0.9, 0.88, 0.91, 0.9],
        }
        actual = mean_story_mse(by_story)
        reps = shuffled_mse_baseline(by_story, seed=0, reps=20)
        assert reps.mean() > actual


class TestWelch:
    def test_equal_samples(self):
        res = welch_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert res.t == 0.0
        assert res.p == pytest.approx(1.0)

    def test_reference_oracle(self):
        a = [1.0, 2.0, 3.0, 4.0]
        b = [2.0, 3.0, 4.0, 5.0]
        res = welch_t_test(a, b)
        ref_t, ref_p = sps.ttest_ind(a, b, equal_var=False)
        assert res.t == pytest.approx(ref_t, abs=1e-9)
        assert res.p == pytest.approx(ref_p, abs=1e-9)

    def test_reference_oracle_random(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            a = rng.normal(0, 1, rng.integers(3, 40))
            b = rng.normal(rng.normal(), rng.uniform(0.5, 2.0), rng.integers(3, 40))
            res = welch_t_test(a, b)
            ref_t, ref_p = sps.ttest_ind(a, b, equal_var=False)
            assert res.t == pytest.approx(ref_t, abs=1e-9)
            assert res.p == pytest.approx(ref_p, abs=1e-9)

    def test_p_decreases_with_shift(self):
        rng = np.random.default_rng(0)
        a = rng.normal(0, 1, 200)
        last_p = 1.1
        for shift in [0.05, 0.2, 0.5, 1.0]:
            p = welch_t_test(a, a + shift).p
            assert p < last_p
            last_p = p

    def test_degenerate(self):
        with pytest.raises(ValueError):
            welch_t_test([1.0, 1.0], [2.0, 2.0])
        with pytest.raises(ValueError):
            welch_t_test([1.0], [1.0, 2.0])


def brute_force_alpha(units):
    """Coincidence-matrix oracle: explicit enumeration of ordered value pairs."""
    cooc = Counter()
    totals = Counter()
    n = 0
    for unit in units:
        m = len(unit)
        if m < 2:
            continue
        n += m
        for v in unit:
            totals[v] += 1
        for i in range(m):
            for j in range(m):
                if i != j:
                    cooc[(unit[i], unit[j])] += 1.0 / (m - 1)
    d_o = sum(v for (c, k), v in cooc.items() if c != k) / n
    d_e = sum(
        totals[c] * totals[k] for c in totals for k in totals if c != k
    ) / (n * (n - 1))
    return 1.0 - d_o / d_e


class TestKrippendorff:
    def test_perfect_agreement(self):
        units = [[1, 1] for _ in range(5)] + [[0, 0] for _ in range(5)]
        assert krippendorff_alpha(units) == pytest.approx(1.0)

    def test_hand_built_matches_oracle(self):
        units = [
            [1, 1, 0],
            [0, 0, 0],
            [1, 0],
            [1, 1, 1, 0],
        ]
        assert krippendorff_alpha(units) == pytest.approx(brute_force_alpha(units), abs=1e-12)

    def test_random_inputs_match_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            units = [
                rng.integers(0, 2, size=rng.integers(1, 6)).tolist()
                for _ in range(rng.integers(2, 30))
            ]
            if len({v for u in units if len(u) >= 2 for v in u}) < 2:
                continue
            assert krippendorff_alpha(units) == pytest.approx(brute_force_alpha(units), abs=1e-12)

    def test_degenerate_identical(self):
        assert math.isnan(krippendorff_alpha([[1, 1], [1, 1, 1]]))

    def test_no_pairable_units(self):
        with pytest.raises(ValueError):
            krippendorff_alpha([[1], [0]])

    def test_decreases_under_random_flips(self):
        rng = np.random.default_rng(0)
        base = [[v] * 4 for v in rng.integers(0, 2, size=60)]
        alphas = []
        for flip_rate in [0.0, 0.15, 0.35]:
            vals = []
            for seed in range(100):
                r = np.random.default_rng(seed)
                units = [
                    [v if r.random() > flip_rate else 1 - v for v in unit] for unit in base
                ]
                a = krippendorff_alpha(units)
                if not math.isnan(a):
                    vals.append(a)
            alphas.append(np.mean(vals))
        assert alphas[0] > alphas[1] > alphas[2]

    def test_units_from_annotations(self):
        story = make_story("s1", "alpha beta gamma")
        anns = [
            ann("s1", Question.READER_PERCEPTION, slider=0.5, highlights=[(0, 5)], pid="p1"),
            ann("s1", Question.READER_PERCEPTION, slider=0.6, highlights=[(0, 5)], pid="p2"),
        ]
        units = highlight_units([story], anns, Question.READER_PERCEPTION)
        assert units == [[1, 1], [0, 0], [0, 0]]
        assert krippendorff_alpha(units) == pytest.approx(1.0)


class TestChanceRate:
    def test_three_of_twenty(self):
        body = " ".join(f"w{i}" for i in range(20))
        story = make_story("s1", body)
        toks = story.tokens
        hl = [(toks[0].char_start, toks[2].char_end)]  # covers 3 tokens
        anns = [ann("s1", Question.READER_PERCEPTION, slider=0.5, highlights=hl)]
        assert chance_highlight_rate([story], anns) == pytest.approx(0.15)

    def test_no_highlights(self):
        story = make_story("s1", "a b c")
        anns = [ann("s1", Question.READER_PERCEPTION, slider=0.5)]
        assert chance_highlight_rate([story], anns) == 0.0

    def test_identity_with_weighted_token_targets(self):
        # chance rate == sum_s sum_j n_s * t_sj / sum_s n_s * T_s, exactly.
        rng = np.random.default_rng(5)
        stories, annotations = [], []
        for k in range(6):
            body = " ".join(f"tok{i}" for i in range(rng.integers(4, 12)))
            story = make_story(f"s{k}", body)
            stories.append(story)
            for p in range(rng.integers(2, 6)):
                hls = []
                for t in story.tokens:
                    if rng.random() < 0.25:
                        hls.append((t.char_start, t.char_end))
                for q in (Question.READER_PERCEPTION, Question.AUTHOR_BELIEF):
                    if rng.random() < 0.15:
                        annotations.append(ann(story.id, q, da=True, pid=f"p{p}"))
                    else:
                        annotations.append(
                            ann(story.id, q, slider=float(rng.random()), highlights=hls, pid=f"p{p}")
                        )
        rate = chance_highlight_rate(stories, annotations)

        num = 0.0
        den = 0.0
        by_story = {}
        for a in annotations:
            by_story.setdefault(a.story_id, []).append(a)
        for story in stories:
            agg = aggregate(story, by_story[story.id])
            for q, targets in agg.token_target.items():
                n = agg.n_ratings[q]
                num += n * sum(targets)
                den += n * len(targets)
        assert rate == pytest.approx(num / den, abs=1e-12)


class TestMajorityAgreement:
    def _corpus_with_focus_token(self, n_stories=12, n_annotators=6):
        # Story lengths vary so the per-story rate samples carry variance.
        stories, annotations = [], []
        for k in range(n_stories):
            body = " ".join(f"w{i}" for i in range(12 + k))
            story = make_story(f"s{k}", body)
            stories.append(story)
            tok = story.tokens[3]
            for p in range(n_annotators):
                annotations.append(
                    ann(story.id, Question.READER_PERCEPTION, slider=0.5,
                        highlights=[(tok.char_start, tok.char_end)], pid=f"p{p}")
                )
        return stories, annotations

    def test_construction_beats_shuffle(self):
        stories, annotations = self._corpus_with_focus_token()
        res = majority_agreement_test(stories, annotations, seed=0)
        assert res.actual_mean > res.shuffled_mean
        assert res.p < 0.05

    def test_shuffle_of_shuffle_indistinguishable(self):
        # Two independent shuffles of the same data should look alike;
        # check across 20 seeds that at least ~all p-values are unremarkable.
        rng = np.random.default_rng(42)
        stories, annotations = [], []
        for k in range(10):
            body = " ".join(f"w{i}" for i in range(20))
            story = make_story(f"s{k}", body)
            stories.append(story)
            for p in range(5):
                hls = [
                    (t.char_start, t.char_end)
                    for t in story.tokens
                    if rng.random() < 0.2
                ]
                annotations.append(
                    ann(story.id, Question.READER_PERCEPTION, slider=0.5,
                        highlights=hls, pid=f"p{p}")
                )
        from guiltspan.stats.highlights import _flags_by_story, _shuffle_flag_sets, majority_rates

        flag_sets = _flags_by_story(stories, annotations, (Question.READER_PERCEPTION,))
        high_p = 0
        for seed in range(20):
            r1 = np.random.default_rng((seed, 1))
            r2 = np.random.default_rng((seed, 2))
            a = np.array(sorted(majority_rates(_shuffle_flag_sets(flag_sets, r1)).values()))
            b = np.array(sorted(majority_rates(_shuffle_flag_sets(flag_sets, r2)).values()))
            if welch_t_test(a, b).p > 0.05:
                high_p += 1
        assert high_p >= 18


class TestWordStats:
    def _toy_corpus(self):
        body = "the suspect allegedly fled the scene"
        stories = [make_story(f"s{k}", body) for k in range(3)]
        annotations = []
        for story in stories:
            alleged_tok = story.tokens[2]
            for p in range(4):
                annotations.append(
                    ann(story.id, Question.READER_PERCEPTION, slider=0.5,
                        highlights=[(alleged_tok.char_start, alleged_tok.char_end)],
                        pid=f"p{p}")
                )
        return stories, annotations

    def test_always_and_never_highlighted(self):
        stories, annotations = self._toy_corpus()
        stats = {ws.word: ws for ws in word_stats(stories, annotations, min_freq=1)}
        assert stats["allegedly"].proportion == pytest.approx(1.0)
        assert stats["suspect"].proportion == pytest.approx(0.0)
        assert "the" not in stats  # stopword

    def test_min_freq_filter(self):
        stories, annotations = self._toy_corpus()
        stats = word_stats(stories, annotations, min_freq=25)
        assert stats == []  # every word occurs only 3 times

    def test_punctuation_excluded(self):
        story = make_story("s1", "guilty ! ?")
        anns = [ann("s1", Question.READER_PERCEPTION, slider=0.5)]
        words = {ws.word for ws in word_stats([story], anns, min_freq=1)}
        assert words == {"guilty"}

    def test_correlation_on_planted_data(self):
        # Highlight events proportional to frequency -> r near 1.
        rng = np.random.default_rng(0)
        stories, annotations = [], []
        vocab = [f"word{i}" for i in range(10)]
        for k in range(30):
            toks = rng.choice(vocab, size=25, p=np.linspace(1, 3, 10) / np.linspace(1, 3, 10).sum())
            story = make_story(f"s{k}", " ".join(toks))
            stories.append(story)
            for p in range(3):
                hls = [
                    (t.char_start, t.char_end) for t in story.tokens if rng.random() < 0.3
                ]
                annotations.append(
                    ann(story.id, Question.READER_PERCEPTION, slider=0.5, highlights=hls, pid=f"p{p}")
                )
        stats = word_stats(stories, annotations, min_freq=1)
        assert highlight_frequency_correlation(stats) > 0.9
