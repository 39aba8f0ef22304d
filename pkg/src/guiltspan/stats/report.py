"""Assemble the full agreement report and emit its CSV/JSON/plot artifacts."""

import csv
from dataclasses import dataclass, field
from pathlib import Path

from ..annotations.types import GUILT_QUESTIONS, Annotation
from ..corpus.types import Story
from .agreement import (
    WelchResult,
    mean_story_mse,
    per_story_mses,
    ratings_by_story,
    shuffled_mse_baseline,
    shuffled_per_story_mses,
    welch_t_test,
)
from .highlights import MajorityAgreementResult, chance_highlight_rate, majority_agreement_test
from .krippendorff import highlight_units, krippendorff_alpha


@dataclass
class AgreementReport:
    mean_story_mse: dict[str, float] = field(default_factory=dict)
    shuffled_mean_mse: dict[str, float] = field(default_factory=dict)
    shuffled_rep_values: dict[str, list[float]] = field(default_factory=dict)
    welch: dict[str, WelchResult] = field(default_factory=dict)
    krippendorff_alpha: dict[str, float] = field(default_factory=dict)
    chance_rate: float = 0.0
    majority: MajorityAgreementResult | None = None

    def to_dict(self) -> dict:
        return {
            "mean_story_mse": dict(sorted(self.mean_story_mse.items())),
            "shuffled_mean_mse": dict(sorted(self.shuffled_mean_mse.items())),
            "shuffled_rep_values": {k: list(v) for k, v in sorted(self.shuffled_rep_values.items())},
            "welch": {k: v.to_dict() for k, v in sorted(self.welch.items())},
            "krippendorff_alpha": dict(sorted(self.krippendorff_alpha.items())),
            "chance_rate": self.chance_rate,
            "majority": self.majority.to_dict() if self.majority else None,
        }


def compute_agreement_report(
    stories: list[Story],
    annotations: list[Annotation],
    seed: int = 0,
    shuffle_reps: int = 20,
    alpha_unit: str = "token",
) -> AgreementReport:
    report = AgreementReport()
    for q in GUILT_QUESTIONS:
        by_story = ratings_by_story(annotations, q)
        by_story = {k: v for k, v in by_story.items() if len(v) >= 2}
        if not by_story:
            continue
        report.mean_story_mse[q.value] = mean_story_mse(by_story)
        reps = shuffled_mse_baseline(by_story, seed=seed, reps=shuffle_reps)
        report.shuffled_rep_values[q.value] = [float(x) for x in reps]
        report.shuffled_mean_mse[q.value] = float(reps.mean())
        report.welch[q.value] = welch_t_test(
            per_story_mses(by_story),
            shuffled_per_story_mses(by_story, seed=seed + 1, reps=1),
        )
        units = highlight_units(stories, annotations, q, unit=alpha_unit)
        report.krippendorff_alpha[q.value] = krippendorff_alpha(units)

    report.chance_rate = chance_highlight_rate(stories, annotations)
    report.majority = majority_agreement_test(stories, annotations, seed=seed + 2)
    return report


def write_agreement_csv(report: AgreementReport, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["question", "mean_story_mse", "shuffled_mean_mse", "welch_t", "welch_df",
             "welch_p", "krippendorff_alpha"]
        )
        for q in sorted(report.mean_story_mse):
            w = report.welch[q]
            writer.writerow(
                [q, f"{report.mean_story_mse[q]:.6f}", f"{report.shuffled_mean_mse[q]:.6f}",
                 f"{w.t:.6f}", f"{w.df:.3f}", f"{w.p:.3e}",
                 f"{report.krippendorff_alpha[q]:.6f}"]
            )
        writer.writerow(["chance_rate", f"{report.chance_rate:.6f}", "", "", "", "", ""])
        if report.majority:
            writer.writerow(
                ["majority_agreement", f"{report.majority.actual_mean:.6f}",
                 f"{report.majority.shuffled_mean:.6f}", f"{report.majority.welch.t:.6f}",
                 f"{report.majority.welch.df:.3f}", f"{report.majority.welch.p:.3e}", ""]
            )
