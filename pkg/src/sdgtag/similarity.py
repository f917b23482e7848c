"""Per-query similarity bundle against the 34-document corpus.

F is the TF-IDF cosine per corpus document, G the average-word-embedding
cosine, U the sentence-encoder cosine, R the paradigmatic topic weight
(squared mean of G by default), and C the combined similarity, by default
(F + U) * R.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import CacheMiss, EmbeddingTable, SentenceCache, awe, canonical_digest, dense_cosine
from .preprocess import ProcessedDocument
from .tfidf import SparseVector, TfIdfModel, sparse_cosine, vectorize

COMBINE_VARIANTS = ("formula", "prose")
R_VARIANTS = ("square_of_mean", "mean_of_squares")


@dataclass(frozen=True)
class SimilarityBundle:
    F: np.ndarray
    G: np.ndarray
    U: np.ndarray
    R: float
    C: np.ndarray


def compute_F(model: TfIdfModel, query: ProcessedDocument) -> np.ndarray:
    """TF-IDF cosine of the query against every corpus document."""
    qvec = vectorize(model, query)
    return query_F(model, qvec)


def query_F(model: TfIdfModel, qvec: SparseVector) -> np.ndarray:
    return np.array([sparse_cosine(qvec, dv) for dv in model.doc_vectors], dtype=np.float64)


def _awe_of(text: str, table: EmbeddingTable) -> np.ndarray:
    # Embedding lookups run on the normalized-unstemmed surface: plain
    # whitespace tokens, stop words kept.
    return awe(text.split(), table)


def compute_G(table: EmbeddingTable, corpus_texts: list[str], query_text: str) -> np.ndarray:
    """AWE cosine of the query against every corpus text.

    Texts must already be normalized; tokenization here is whitespace only.
    """
    qvec = _awe_of(query_text, table)
    return np.array([dense_cosine(qvec, _awe_of(t, table)) for t in corpus_texts], dtype=np.float64)


def compute_U(cache: SentenceCache, corpus_texts: list[str], query_text: str) -> np.ndarray:
    """Sentence-encoder cosine of the query against every corpus text.

    Raises CacheMiss carrying every absent digest so a single preflight rerun
    can repair the cache.
    """
    texts = [query_text, *corpus_texts]
    missing = [canonical_digest(t) for t in texts if canonical_digest(t) not in cache.entries]
    if missing:
        raise CacheMiss(sorted(set(missing)))
    qvec = cache.entries[canonical_digest(query_text)]
    return np.array(
        [dense_cosine(qvec, cache.entries[canonical_digest(t)]) for t in corpus_texts],
        dtype=np.float64,
    )


def compute_R(G: np.ndarray, variant: str = "square_of_mean") -> float:
    """Paradigmatic topic weight derived from G.

    The default squares the mean, which vanishes for topic-irrelevant
    queries; the mean-of-squares alternative is kept for ablations.
    """
    if variant == "square_of_mean":
        return float(np.mean(G)) ** 2
    if variant == "mean_of_squares":
        return float(np.mean(np.square(G)))
    raise ValueError(f"unknown R variant: {variant!r}")


def combine(
    F: np.ndarray,
    U: np.ndarray,
    G: np.ndarray,
    R: float,
    variant: str = "formula",
) -> np.ndarray:
    """Combined similarity C.

    "formula" computes (F + U) * R; "prose" is the (F + G) * R alternative,
    selectable for ablations.
    """
    if variant == "formula":
        return (F + U) * R
    if variant == "prose":
        return (F + G) * R
    raise ValueError(f"unknown combine variant: {variant!r}")


def compute_bundle(
    model: TfIdfModel,
    table: EmbeddingTable,
    cache: SentenceCache,
    corpus_texts: list[str],
    query: ProcessedDocument,
    query_text: str,
    combine_variant: str = "formula",
    r_variant: str = "square_of_mean",
) -> SimilarityBundle:
    """All similarity quantities for one query, index-aligned with the corpus."""
    F = compute_F(model, query)
    G = compute_G(table, corpus_texts, query_text)
    U = compute_U(cache, corpus_texts, query_text)
    R = compute_R(G, r_variant)
    C = combine(F, U, G, R, combine_variant)
    return SimilarityBundle(F=F, G=G, U=U, R=R, C=C)
