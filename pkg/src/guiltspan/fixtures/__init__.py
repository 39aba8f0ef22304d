from .synthetic import (
    CUE_LEVELS,
    CUE_TYPES,
    CUE_WEIGHTS,
    N_ANNOTATORS,
    RATING_BASE,
    RATING_SLOPE,
    FixtureTruth,
    generate_fixture,
    write_fixture,
)

__all__ = [
    "CUE_LEVELS",
    "CUE_TYPES",
    "CUE_WEIGHTS",
    "N_ANNOTATORS",
    "RATING_BASE",
    "RATING_SLOPE",
    "FixtureTruth",
    "generate_fixture",
    "write_fixture",
]
