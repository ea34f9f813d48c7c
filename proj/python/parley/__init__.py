"""Dialogue-note structuring and issue-position measurement."""

from parley._core import (
    EmbeddingTable,
    ParleyError,
    __version__,
    anisotropy,
    clean_text,
    cosine,
    default_stopwords,
    expand_issues,
    parse_notes,
    pool,
    run,
    tokenize,
    topic_keywords_from_texts,
)

__all__ = [
    "EmbeddingTable",
    "ParleyError",
    "__version__",
    "anisotropy",
    "clean_text",
    "cosine",
    "default_stopwords",
    "expand_issues",
    "parse_notes",
    "pool",
    "run",
    "tokenize",
    "topic_keywords_from_texts",
]
