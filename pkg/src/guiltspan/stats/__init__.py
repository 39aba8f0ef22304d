from .agreement import (
    WelchResult,
    mean_story_mse,
    per_story_mses,
    ratings_by_story,
    shuffle_ratings,
    shuffled_mse_baseline,
    shuffled_per_story_mses,
    story_mse,
    welch_t_test,
)
from .krippendorff import highlight_units, krippendorff_alpha
from .highlights import (
    MajorityAgreementResult,
    chance_highlight_rate,
    majority_agreement_test,
    majority_rates,
)
from .words import (
    WordStats,
    highlight_frequency_correlation,
    load_stopwords,
    question_difference_table,
    top_highlighted,
    word_stats,
    write_word_stats_csv,
)
from .report import AgreementReport, compute_agreement_report, write_agreement_csv

__all__ = [
    "story_mse",
    "ratings_by_story",
    "per_story_mses",
    "mean_story_mse",
    "shuffle_ratings",
    "shuffled_mse_baseline",
    "shuffled_per_story_mses",
    "welch_t_test",
    "WelchResult",
    "krippendorff_alpha",
    "highlight_units",
    "chance_highlight_rate",
    "majority_rates",
    "majority_agreement_test",
    "MajorityAgreementResult",
    "WordStats",
    "word_stats",
    "load_stopwords",
    "highlight_frequency_correlation",
    "top_highlighted",
    "question_difference_table",
    "write_word_stats_csv",
    "AgreementReport",
    "compute_agreement_report",
    "write_agreement_csv",
]
