"""Repeated-split evaluation protocol and its report.

Per repeat: one 85/15 story split shared by every variant; per variant:
k-fold grid search on the training side, a final model trained for the
step count given by the checkpoint rule, and one test MSE. Artifacts are
one JSON per (question, variant, repeat) under a content-addressed name,
so interrupted experiments resume and reports rebuild bit-identically
from disk.
"""

import hashlib
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from ..corpus.splits import split_corpus
from ..io import canonical_dumps, read_json, write_json
from .baseline import mean_baseline
from .bootstrap import bootstrap_ci
from .grid import FoldOutcome, GridSearchResult, cv_grid_search
from .wilcoxon import wilcoxon_signed_rank

MODEL_VARIANTS = (
    "cls",
    "cls+pretrain",
    "cls+token",
    "cls+pretrain+token",
    "mean",
    "mean+pretrain",
    "mean+token",
    "mean+pretrain+token",
)
ALL_VARIANTS = ("mean_baseline",) + MODEL_VARIANTS


def parse_variant(variant: str) -> dict:
    if variant == "mean_baseline":
        return {"baseline": True}
    parts = variant.split("+")
    pooling = parts[0]
    if pooling not in ("cls", "mean"):
        raise ValueError(f"unknown variant {variant!r}")
    return {
        "baseline": False,
        "pooling": pooling,
        "pretrain": "pretrain" in parts[1:],
        "token": "token" in parts[1:],
    }


@dataclass
class ExperimentPlan:
    n_repeats: int = 20
    test_fraction: float = 0.15
    folds: int = 5
    questions: list[str] = field(
        default_factory=lambda: ["reader_perception", "author_belief"]
    )
    variants: list[str] = field(default_factory=lambda: list(ALL_VARIANTS))
    learning_rates: list[float] = field(default_factory=lambda: [3e-5, 5e-5])
    lams: list[float] = field(default_factory=lambda: [1.0, 2.0])
    seeds: list[int] = field(default_factory=lambda: [0, 1])
    epochs: int = 5
    warmup_ratio: float = 0.1
    batch_size: int = 16
    checkpoint_every: int = 100
    max_length: int = 400
    base_seed: int = 0
    bootstrap_resamples: int = 10_000
    oversample_tail: bool = False
    encoder: dict = field(default_factory=dict)
    pretrain: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentPlan":
        return cls(**d)

    def plan_hash(self) -> str:
        return hashlib.sha256(canonical_dumps(self.to_dict()).encode()).hexdigest()[:16]

    def grid_for(self, variant: str) -> list[dict]:
        """Token-supervised variants sweep the loss ratio with one seed;
        the others sweep seeds at ratio zero."""
        spec = parse_variant(variant)
        if spec["baseline"]:
            return [{}]
        if spec["token"]:
            return [
                {"learning_rate": lr, "lam": lam, "seed": self.seeds[0]}
                for lr in self.learning_rates
                for lam in self.lams
            ]
        return [
            {"learning_rate": lr, "lam": 0.0, "seed": seed}
            for lr in self.learning_rates
            for seed in self.seeds
        ]


@dataclass
class RunOutcome:
    test_mse: float
    best_config: dict
    final_steps: int
    extra: dict = field(default_factory=dict)


def split_hash(train_ids: list[str], test_ids: list[str]) -> str:
    blob = canonical_dumps({"train": sorted(train_ids), "test": sorted(test_ids)})
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def repeat_split(plan: ExperimentPlan, story_ids: list[str], repeat: int) -> tuple[list[str], list[str]]:
    train, test = split_corpus(
        sorted(story_ids),
        (1.0 - plan.test_fraction, plan.test_fraction),
        seed=plan.base_seed + repeat,
        key=lambda x: x,
    )
    return list(train), list(test)


def artifact_name(plan: ExperimentPlan, question: str, variant: str, repeat: int) -> str:
    key = canonical_dumps(
        {"plan": plan.to_dict(), "question": question, "variant": variant, "repeat": repeat}
    )
    return hashlib.sha256(key.encode()).hexdigest()[:24] + ".json"


def run_experiment(
    plan: ExperimentPlan,
    items: dict[str, dict],
    runner,
    out_dir: str | Path,
) -> "EvalReport":
    """items: story_id -> {question -> target or item payload}; the runner
    interprets payloads. Artifacts already on disk are not recomputed."""
    out = Path(out_dir)
    runs_dir = out / "runs"
    runs_dir.mkdir(parents=True, exist_ok=True)
    story_ids = sorted(items)
    if len(story_ids) < plan.folds + 1:
        raise ValueError("corpus too small for the plan")

    for repeat in range(plan.n_repeats):
        train_ids, test_ids = repeat_split(plan, story_ids, repeat)
        shash = split_hash(train_ids, test_ids)
        for question in plan.questions:
            q_train = [sid for sid in train_ids if question in items[sid]]
            q_test = [sid for sid in test_ids if question in items[sid]]
            for variant in plan.variants:
                path = runs_dir / artifact_name(plan, question, variant, repeat)
                if path.exists():
                    continue
                outcome = runner.run(
                    question=question,
                    variant=variant,
                    train_ids=q_train,
                    test_ids=q_test,
                    items=items,
                    plan=plan,
                    repeat=repeat,
                )
                write_json(
                    path,
                    {
                        "question": question,
                        "variant": variant,
                        "repeat": repeat,
                        "test_mse": outcome.test_mse,
                        "best_config": outcome.best_config,
                        "final_steps": outcome.final_steps,
                        "split_hash": shash,
                        "extra": outcome.extra,
                    },
                )
    return build_report(plan, out)


@dataclass
class VariantSummary:
    variant: str
    question: str
    mses: list[float]
    mean: float
    std: float
    ci_lo: float
    ci_hi: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class EvalReport:
    plan_hash: str
    summaries: list[VariantSummary]
    significance: list[dict]  # {question, a, b, p, method, n}

    def summary(self, question: str, variant: str) -> VariantSummary:
        for s in self.summaries:
            if s.question == question and s.variant == variant:
                return s
        raise KeyError((question, variant))

    def to_dict(self) -> dict:
        return {
            "plan_hash": self.plan_hash,
            "summaries": [s.to_dict() for s in self.summaries],
            "significance": list(self.significance),
        }


def build_report(plan: ExperimentPlan, out_dir: str | Path) -> EvalReport:
    """Pure function of the persisted run artifacts."""
    runs_dir = Path(out_dir) / "runs"
    by_key: dict[tuple[str, str], dict[int, float]] = {}
    split_by_repeat: dict[tuple[str, int], set[str]] = {}
    for path in sorted(runs_dir.glob("*.json")):
        rec = read_json(path)
        by_key.setdefault((rec["question"], rec["variant"]), {})[rec["repeat"]] = rec["test_mse"]
        split_by_repeat.setdefault((rec["question"], rec["repeat"]), set()).add(rec["split_hash"])

    for (question, repeat), hashes in split_by_repeat.items():
        if len(hashes) != 1:
            raise AssertionError(
                f"variants of repeat {repeat} ({question}) saw different splits: {hashes}"
            )

    summaries: list[VariantSummary] = []
    for qi, question in enumerate(plan.questions):
        for vi, variant in enumerate(plan.variants):
            per_repeat = by_key.get((question, variant))
            if not per_repeat:
                continue
            mses = [per_repeat[r] for r in sorted(per_repeat)]
            lo, hi = bootstrap_ci(
                mses,
                level=0.95,
                resamples=plan.bootstrap_resamples,
                seed=plan.base_seed + 1000 * qi + vi,
            )
            summaries.append(
                VariantSummary(
                    variant=variant,
                    question=question,
                    mses=mses,
                    mean=float(np.mean(mses)),
                    std=float(np.std(mses, ddof=1)) if len(mses) > 1 else 0.0,
                    ci_lo=lo,
                    ci_hi=hi,
                )
            )

    significance: list[dict] = []
    for question in plan.questions:
        q_sums = [s for s in summaries if s.question == question]
        for sa in q_sums:
            for sb in q_sums:
                if sa.variant == sb.variant:
                    continue
                if len(sa.mses) != len(sb.mses) or len(sa.mses) < 5:
                    continue
                res = wilcoxon_signed_rank(sa.mses, sb.mses)
                significance.append(
                    {
                        "question": question,
                        "a": sa.variant,
                        "b": sb.variant,
                        "p": res.p,
                        "method": res.method,
                        "n": res.n,
                    }
                )

    return EvalReport(plan_hash=plan.plan_hash(), summaries=summaries, significance=significance)


def write_results_table_csv(report: EvalReport, plan: ExperimentPlan, path: str | Path) -> None:
    """Rows = variants, columns = per-question mean and std."""
    import csv

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["variant"]
        for q in plan.questions:
            header += [f"{q}_mean", f"{q}_std"]
        writer.writerow(header)
        for variant in plan.variants:
            row = [variant]
            for q in plan.questions:
                try:
                    s = report.summary(q, variant)
                    row += [f"{s.mean:.6f}", f"{s.std:.6f}"]
                except KeyError:
                    row += ["", ""]
            writer.writerow(row)


def write_ci_csv(report: EvalReport, path: str | Path) -> None:
    import csv

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["question", "variant", "mean", "ci_lo", "ci_hi", "n_repeats"])
        for s in report.summaries:
            writer.writerow(
                [s.question, s.variant, f"{s.mean:.6f}", f"{s.ci_lo:.6f}",
                 f"{s.ci_hi:.6f}", len(s.mses)]
            )


def write_significance_csv(report: EvalReport, path: str | Path) -> None:
    import csv

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["question", "a_better_than_b__a", "b", "p_one_sided", "method", "n"])
        for row in report.significance:
            writer.writerow(
                [row["question"], row["a"], row["b"], f"{row['p']:.6g}",
                 row["method"], row["n"]]
            )
