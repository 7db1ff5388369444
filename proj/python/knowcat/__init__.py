"""Python bindings for the knowcat evaluation library."""

from ._core import (
    KnowcatError,
    UsageError,
    __version__,
    category_score,
    classify,
    classify_snapshot,
    compare,
    confidence,
    extract_final_answer,
    is_correct,
    normalize_answer,
    sample_mock,
    transition_ratios,
)

CATEGORIES = ("HK", "MK", "WK", "UU", "MU", "CU")

__all__ = [
    "CATEGORIES",
    "KnowcatError",
    "UsageError",
    "__version__",
    "category_score",
    "classify",
    "classify_snapshot",
    "compare",
    "confidence",
    "extract_final_answer",
    "is_correct",
    "normalize_answer",
    "sample_mock",
    "transition_ratios",
]
