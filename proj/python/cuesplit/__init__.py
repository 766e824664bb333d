"""Section splitting and attribute extraction for OCR'd contracts."""

from ._core import (
    Corpus,
    Error,
    Extractors,
    Rules,
    Splitter,
    ValidationError,
    __version__,
    ablation_csv,
    evaluate_sections,
    format_delta,
    length_csv,
    metrics,
    normalize_answer,
)

__all__ = [
    "Corpus",
    "Error",
    "Extractors",
    "Rules",
    "Splitter",
    "ValidationError",
    "__version__",
    "ablation_csv",
    "evaluate_sections",
    "format_delta",
    "length_csv",
    "metrics",
    "normalize_answer",
]
