"""Readability measurement, corpus balancing and evaluation for Turkish summarization."""

from yodkit.text_core import TextStats, WordToken, compute_stats, split_sentences, tokenize_words
from yodkit.readability import ReadabilityScore, yod, yod_success, yod_to_level

__all__ = [
    "ReadabilityScore",
    "TextStats",
    "WordToken",
    "compute_stats",
    "split_sentences",
    "tokenize_words",
    "yod",
    "yod_success",
    "yod_to_level",
]

__version__ = "0.1.0"
