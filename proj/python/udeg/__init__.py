# SPDX-License-Identifier: Apache-2.0
"""Document expansion, BM25/QL retrieval and evaluation."""

from ._core import (
    Index,
    evaluate,
    expand,
    lexical_diversity,
    lexrank_extract,
    porter_stem,
    split_sentences,
    tokenize,
)

__all__ = [
    "Index",
    "evaluate",
    "expand",
    "lexical_diversity",
    "lexrank_extract",
    "porter_stem",
    "split_sentences",
    "tokenize",
]
