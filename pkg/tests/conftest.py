"""Shared fixtures: the bundled corpus plus synthetic embedding artifacts.

The synthetic word table maps every token to one shared vector, which makes
every AWE cosine 1 and the topic weight R exactly 1. Synthetic sentence
caches map each corpus text to a distinct orthonormal basis vector, so the
sentence similarity of a query equals an indicator of the corpus document
its vector was copied from.
"""

from __future__ import annotations

from pathlib import Path

import pytest

from sdgtag.classifier import Models
from sdgtag.embeddings import (
    canonical_digest,
    load_sentence_cache,
    load_word_table,
)
from sdgtag.preprocess import normalize
from sdgtag.tfidf import Corpus, build_corpus, load_definitions


def write_word_table(path: Path, dimension: int, vectors: dict[str, list[float]]) -> Path:
    lines = [str(dimension)]
    for token in sorted(vectors):
        lines.append(token + "\t" + " ".join(repr(float(x)) for x in vectors[token]))
    path.write_text("\n".join(lines) + "\n", "utf-8")
    return path


def write_sentence_cache(
    path: Path, dimension: int, tag: str, text_vectors: dict[str, list[float]]
) -> Path:
    """Cache file keyed by text; digests are computed here."""
    lines = [f"{dimension}\t{tag}"]
    rows = {canonical_digest(text): vec for text, vec in text_vectors.items()}
    for digest in sorted(rows):
        lines.append(digest + "\t" + " ".join(repr(float(x)) for x in rows[digest]))
    path.write_text("\n".join(lines) + "\n", "utf-8")
    return path


def uniform_token_vectors(texts: list[str], vector: list[float]) -> dict[str, list[float]]:
    tokens = {token for text in texts for token in text.split()}
    return {token: vector for token in tokens}


def basis_vector(index: int, dimension: int) -> list[float]:
    vec = [0.0] * dimension
    vec[index] = 1.0
    return vec


def orthonormal_text_vectors(
    corpus: Corpus, extra_texts: dict[str, int] | None = None, dimension: int | None = None
) -> tuple[int, dict[str, list[float]]]:
    """Each corpus text gets its own basis vector; extras map text -> doc index.

    Extra texts are raw queries; they are normalized here so their digests
    match what the pipeline looks up.
    """
    n = len(corpus.documents)
    dimension = dimension or n
    mapping = {doc.text: basis_vector(i, dimension) for i, doc in enumerate(corpus.documents)}
    for text, index in (extra_texts or {}).items():
        mapping[normalize(text)] = basis_vector(index, dimension)
    return dimension, mapping


@pytest.fixture(scope="session")
def corpus() -> Corpus:
    return build_corpus(load_definitions())


@pytest.fixture()
def synthetic_models(corpus, tmp_path) -> Models:
    """Corpus + uniform word table + orthonormal DAN cache over corpus texts."""
    texts = [d.text for d in corpus.documents]
    table_path = write_word_table(
        tmp_path / "words.tsv", 2, uniform_token_vectors(texts, [1.0, 0.0])
    )
    dimension, vectors = orthonormal_text_vectors(corpus)
    cache_path = write_sentence_cache(tmp_path / "dan.tsv", dimension, "dan", vectors)
    return Models(
        corpus=corpus,
        word_table=load_word_table(table_path),
        caches={"dan": load_sentence_cache(cache_path)},
    )
