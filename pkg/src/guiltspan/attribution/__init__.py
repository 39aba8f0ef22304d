from .integrated_gradients import (
    AttributionResult,
    integrate_gradients_fn,
    integrated_gradients,
)
from .importance import (
    HighlightComparison,
    WordImportance,
    aggregate_importance,
    compare_to_highlights,
    write_importance_csv,
)

__all__ = [
    "AttributionResult",
    "integrate_gradients_fn",
    "integrated_gradients",
    "WordImportance",
    "aggregate_importance",
    "HighlightComparison",
    "compare_to_highlights",
    "write_importance_csv",
]
