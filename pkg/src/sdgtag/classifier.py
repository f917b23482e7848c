"""Ranked multi-label prediction from combined similarities.

The combined similarity over the 34 corpus documents is log-length scaled,
summed per goal (class document plus bias document), centered by its mean,
and thresholded. Five strategy variants are selectable: the two full
ensembles (DAN or Transformer sentence cache) and three baselines that
replace the TF-IDF component with a single generic similarity and drop the
topic weighting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .embeddings import EmbeddingTable, SentenceCache
from .preprocess import SDG_MAX, normalize, process
from .similarity import (
    combine,
    compute_F,
    compute_G,
    compute_R,
    compute_U,
)
from .tfidf import Corpus, TfIdfModel, build_model

DEFAULT_THRESHOLD = 0.6


@dataclass(frozen=True)
class StrategySpec:
    name: str
    encoder_tag: str | None  # None when no sentence cache is consulted
    uses_tfidf: bool
    uses_topic_weight: bool


STRATEGIES: dict[str, StrategySpec] = {
    s.name: s
    for s in (
        StrategySpec("cdm_dan", "dan", uses_tfidf=True, uses_topic_weight=True),
        StrategySpec("cdm_transformer", "transformer", uses_tfidf=True, uses_topic_weight=True),
        StrategySpec("awe_baseline", None, uses_tfidf=False, uses_topic_weight=False),
        StrategySpec("use_dan_baseline", "dan", uses_tfidf=False, uses_topic_weight=False),
        StrategySpec("use_transformer_baseline", "transformer", uses_tfidf=False, uses_topic_weight=False),
    )
}


class ModelNotLoaded(RuntimeError):
    pass


@dataclass
class Models:
    """Everything a strategy may need, loaded once and shared read-only.

    The TF-IDF model is built lazily so baseline runs never touch it.
    """

    corpus: Corpus
    word_table: EmbeddingTable | None = None
    caches: dict[str, SentenceCache] = field(default_factory=dict)
    _tfidf: TfIdfModel | None = None

    @property
    def corpus_texts(self) -> list[str]:
        return [d.text for d in self.corpus.documents]

    def tfidf_model(self) -> TfIdfModel:
        if self._tfidf is None:
            self._tfidf = build_model(self.corpus)
        return self._tfidf

    def cache_for(self, tag: str) -> SentenceCache:
        cache = self.caches.get(tag)
        if cache is None:
            raise ModelNotLoaded(f"no sentence cache loaded for encoder tag {tag!r}")
        return cache

    def require(self, strategy: StrategySpec) -> None:
        if (strategy.uses_tfidf or strategy.name == "awe_baseline") and self.word_table is None:
            raise ModelNotLoaded(f"strategy {strategy.name!r} needs a word-embedding table")
        if strategy.encoder_tag is not None:
            self.cache_for(strategy.encoder_tag)


@dataclass(frozen=True)
class ClassificationState:
    """Intermediate quantities of one classification, kept for inspection."""

    W: np.ndarray  # scaled combined similarity, per corpus document
    L: float  # binary log of the query token count
    B: np.ndarray  # centered per-goal biased similarity
    M: float  # mean subtracted during centering
    T: float
    V: tuple[int, ...]  # goal ids above threshold, best first


@dataclass(frozen=True)
class ClassificationResult:
    labels: tuple[tuple[int, float], ...]  # (sdg_id, centered score), best first

    @property
    def is_unrelated(self) -> bool:
        return not self.labels


def log_length_scale(C: np.ndarray, token_count: int) -> np.ndarray:
    """Scale C by 1 + log2(token count); empty queries pass through unscaled."""
    if token_count <= 0:
        return C.copy()
    return C * (1.0 + math.log2(token_count))


def biased_similarity(W: np.ndarray) -> np.ndarray:
    """Per-goal sum of the class-document and bias-document entries."""
    return W.reshape(SDG_MAX, 2).sum(axis=1)


def center(B: np.ndarray) -> tuple[np.ndarray, float]:
    """Subtract the mean so scores express deviation from the typical goal."""
    M = float(np.mean(B))
    return B - M, M


def threshold_rank(B_centered: np.ndarray, threshold: float) -> ClassificationResult:
    """Goals strictly above the threshold, sorted by score, ties by id."""
    ranked = sorted(
        ((k + 1, float(B_centered[k])) for k in range(SDG_MAX) if B_centered[k] > threshold),
        key=lambda pair: (-pair[1], pair[0]),
    )
    return ClassificationResult(labels=tuple(ranked))


def combined_similarity(
    query_text: str,
    strategy: StrategySpec,
    models: Models,
    combine_variant: str = "formula",
    r_variant: str = "square_of_mean",
) -> np.ndarray:
    """The strategy's combined similarity C over the 34 corpus documents.

    Ensembles compute (F + U) * R. Baselines substitute their single generic
    similarity S into F's slot with no topic weight, which collapses the sum
    to 2 * S.
    """
    texts = models.corpus_texts
    query_norm = normalize(query_text)

    if strategy.uses_tfidf:
        F = compute_F(models.tfidf_model(), process(query_text))
        G = compute_G(models.word_table, texts, query_norm)
        U = compute_U(models.cache_for(strategy.encoder_tag), texts, query_norm)
        R = compute_R(G, r_variant) if strategy.uses_topic_weight else 1.0
        return combine(F, U, G, R, combine_variant)

    if strategy.encoder_tag is None:
        S = compute_G(models.word_table, texts, query_norm)
    else:
        S = compute_U(models.cache_for(strategy.encoder_tag), texts, query_norm)
    return 2.0 * S


def classify_state(
    query_text: str,
    strategy: StrategySpec,
    threshold: float,
    models: Models,
    combine_variant: str = "formula",
    r_variant: str = "square_of_mean",
) -> tuple[ClassificationState, ClassificationResult]:
    """Run the full pipeline and keep every intermediate quantity."""
    models.require(strategy)
    C = combined_similarity(query_text, strategy, models, combine_variant, r_variant)
    token_count = process(query_text).token_count
    W = log_length_scale(C, token_count)
    B_centered, M = center(biased_similarity(W))
    result = threshold_rank(B_centered, threshold)
    state = ClassificationState(
        W=W,
        L=math.log2(token_count) if token_count >= 1 else 0.0,
        B=B_centered,
        M=M,
        T=threshold,
        V=tuple(sdg_id for sdg_id, _ in result.labels),
    )
    return state, result


def classify(
    query_text: str,
    strategy: StrategySpec,
    threshold: float,
    models: Models,
    combine_variant: str = "formula",
    r_variant: str = "square_of_mean",
) -> ClassificationResult:
    """Ranked goals for one query; empty labels mean "no SDG"."""
    _, result = classify_state(query_text, strategy, threshold, models, combine_variant, r_variant)
    return result
