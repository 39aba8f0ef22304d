from .baseline import mean_baseline
from .bootstrap import bootstrap_ci
from .wilcoxon import WilcoxonResult, wilcoxon_signed_rank
from .grid import (
    ConfigScore,
    FoldOutcome,
    GridSearchResult,
    cv_grid_search,
    final_steps_rule,
    kfold_indices,
)
from .experiment import (
    ALL_VARIANTS,
    MODEL_VARIANTS,
    EvalReport,
    ExperimentPlan,
    RunOutcome,
    VariantSummary,
    build_report,
    parse_variant,
    repeat_split,
    run_experiment,
    split_hash,
    write_ci_csv,
    write_results_table_csv,
    write_significance_csv,
)
from .runner import ModelRunner, items_from_aggregated

__all__ = [
    "mean_baseline",
    "bootstrap_ci",
    "wilcoxon_signed_rank",
    "WilcoxonResult",
    "kfold_indices",
    "final_steps_rule",
    "cv_grid_search",
    "FoldOutcome",
    "ConfigScore",
    "GridSearchResult",
    "ExperimentPlan",
    "RunOutcome",
    "EvalReport",
    "VariantSummary",
    "run_experiment",
    "build_report",
    "repeat_split",
    "split_hash",
    "parse_variant",
    "ALL_VARIANTS",
    "MODEL_VARIANTS",
    "write_results_table_csv",
    "write_ci_csv",
    "write_significance_csv",
    "ModelRunner",
    "items_from_aggregated",
]
