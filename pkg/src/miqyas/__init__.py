"""miqyas: Arabic sentence readability leveling toolkit."""

from .levels import (
    GranularityMap,
    ReadabilityLevel,
    level_distance,
    load_grade_bands,
    load_granularity_map,
    parse_level,
)
from .text import count_syllables, count_words, detect_features, strip_diacritics, tokenize
from .guidelines import compute_floor, load_profile, validate_choice

__version__ = "0.1.0"

__all__ = [
    "GranularityMap",
    "ReadabilityLevel",
    "compute_floor",
    "count_syllables",
    "count_words",
    "detect_features",
    "level_distance",
    "load_grade_bands",
    "load_granularity_map",
    "load_profile",
    "parse_level",
    "strip_diacritics",
    "tokenize",
    "validate_choice",
]
