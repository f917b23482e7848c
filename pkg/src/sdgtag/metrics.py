"""Evaluation measures for annotated paragraph datasets.

Implements Label Ranking Average Precision, support-weighted F1, and the
Best-Ranked reductions (accuracy and weighted F1 over one label per sample).
"No SDG" participates as a synthetic label so that empty annotation sets and
empty predictions are first-class outcomes.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classifier import Models, StrategySpec, classify_state
from .embeddings import CacheMiss, canonical_digest
from .preprocess import SDG_MAX, normalize

NO_SDG = 0  # synthetic label for "not related to any SDG"


class EmptyDataset(ValueError):
    pass


@dataclass(frozen=True)
class AnnotatedParagraph:
    source_id: str
    text: str
    true_labels: frozenset[int]  # subset of {1..17}; empty means "no SDG"


@dataclass(frozen=True)
class EvalReport:
    lrap: float
    weighted_f1: float
    br_accuracy: float
    br_weighted_f1: float
    per_class_support: dict[str, int]
    class_distribution: dict[str, float]
    threshold: float
    strategy: str
    rng_seed: int
    n_samples: int
    lrap_excluded: int  # empty-truth samples, undefined under LRAP

    def to_json(self) -> str:
        payload = {
            "lrap": self.lrap,
            "weighted_f1": self.weighted_f1,
            "br_accuracy": self.br_accuracy,
            "br_weighted_f1": self.br_weighted_f1,
            "per_class_support": self.per_class_support,
            "class_distribution": self.class_distribution,
            "threshold": self.threshold,
            "strategy": self.strategy,
            "rng_seed": self.rng_seed,
            "n_samples": self.n_samples,
            "lrap_excluded": self.lrap_excluded,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def load_dataset(path: str | Path) -> list[AnnotatedParagraph]:
    """Read a JSON Lines dataset: {"source_id", "text", "labels"} per line."""
    paragraphs = []
    for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            labels = frozenset(int(x) for x in record.get("labels", []))
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise ValueError(f"{path}:{lineno}: bad dataset record: {exc}") from None
        if not labels <= frozenset(range(1, SDG_MAX + 1)):
            raise ValueError(f"{path}:{lineno}: labels outside 1..{SDG_MAX}: {sorted(labels)}")
        paragraphs.append(
            AnnotatedParagraph(
                source_id=str(record.get("source_id", f"p{lineno}")),
                text=str(record["text"]),
                true_labels=labels,
            )
        )
    return paragraphs


def lrap(truth: list[frozenset[int]], scores: list[np.ndarray]) -> float:
    """Label Ranking Average Precision over samples with nonempty truth.

    rank counts ties as ranked ahead-or-equal; samples without true labels
    are excluded because LRAP is undefined for them.
    """
    if len(truth) != len(scores):
        raise ValueError("truth and scores are not aligned")
    per_sample = []
    for labels, s in zip(truth, scores):
        if not labels:
            continue
        total = 0.0
        for label in labels:
            rank = int(np.sum(s >= s[label - 1]))
            true_at_or_above = sum(1 for other in labels if s[other - 1] >= s[label - 1])
            total += true_at_or_above / rank
        per_sample.append(total / len(labels))
    if not per_sample:
        raise EmptyDataset("no samples with true labels; LRAP undefined")
    return float(np.mean(per_sample))


def _weighted_f1_over_sets(truth: list[frozenset[int]], predicted: list[frozenset[int]]) -> float:
    """Support-weighted one-vs-rest F1 over labels {0..17} (0 = no SDG)."""
    if len(truth) != len(predicted):
        raise ValueError("truth and predictions are not aligned")
    if not truth:
        raise EmptyDataset("no samples")
    weighted_sum = 0.0
    total_support = 0
    for label in range(0, SDG_MAX + 1):
        tp = sum(1 for t, p in zip(truth, predicted) if label in t and label in p)
        fp = sum(1 for t, p in zip(truth, predicted) if label not in t and label in p)
        fn = sum(1 for t, p in zip(truth, predicted) if label in t and label not in p)
        support = tp + fn
        denom = 2 * tp + fp + fn
        f1 = (2 * tp / denom) if denom else 0.0
        weighted_sum += support * f1
        total_support += support
    return weighted_sum / total_support if total_support else 0.0


def _with_no_sdg(labels: frozenset[int]) -> frozenset[int]:
    return labels if labels else frozenset({NO_SDG})


def weighted_f1(truth: list[frozenset[int]], predicted: list[frozenset[int]]) -> float:
    """Support-weighted F1; empty sets count as the synthetic no-SDG label."""
    return _weighted_f1_over_sets(
        [_with_no_sdg(t) for t in truth], [_with_no_sdg(p) for p in predicted]
    )


def best_ranked(truth: frozenset[int], ranked_predictions: tuple[int, ...], rng: random.Random) -> int:
    """The best-ranked prediction that is true, else a seeded-random true label.

    Empty truth is treated as {no_sdg} and empty predictions as [no_sdg].
    """
    truth_eff = _with_no_sdg(truth)
    ranked_eff = ranked_predictions if ranked_predictions else (NO_SDG,)
    for label in ranked_eff:
        if label in truth_eff:
            return label
    return rng.choice(sorted(truth_eff))


def best_ranked_pair(
    truth: frozenset[int], ranked_predictions: tuple[int, ...], rng: random.Random
) -> tuple[int, int]:
    """Single-label (true, predicted) reduction of one sample.

    When some true label was predicted the pair agrees on it; otherwise the
    miss is charged to a random true label against the top prediction.
    """
    truth_eff = _with_no_sdg(truth)
    ranked_eff = ranked_predictions if ranked_predictions else (NO_SDG,)
    for label in ranked_eff:
        if label in truth_eff:
            return label, label
    return rng.choice(sorted(truth_eff)), ranked_eff[0]


def class_distribution(truth: list[frozenset[int]]) -> dict[str, float]:
    """Fractions of no-SDG / SDG-16 / SDG-17 / remaining over all labels."""
    labels = [label for t in truth for label in sorted(_with_no_sdg(t))]
    total = len(labels)
    if total == 0:
        raise EmptyDataset("no samples")
    counts = {
        "no_sdg": sum(1 for x in labels if x == NO_SDG),
        "sdg16": sum(1 for x in labels if x == 16),
        "sdg17": sum(1 for x in labels if x == 17),
    }
    counts["remaining"] = total - sum(counts.values())
    return {key: count / total for key, count in counts.items()}


def classify_dataset(
    dataset: list[AnnotatedParagraph],
    strategy: StrategySpec,
    threshold: float,
    models: Models,
    combine_variant: str = "formula",
    r_variant: str = "square_of_mean",
    workers: int = 1,
) -> list[tuple[np.ndarray, tuple[int, ...]]]:
    """Per-sample (score vector, ranked predictions), in dataset order.

    Classification is pure, so samples fan out over a worker pool; results
    are collected back in input order. A missing cache entry anywhere aborts
    the run with the union of missing digests.
    """

    def one(paragraph: AnnotatedParagraph) -> tuple[np.ndarray, tuple[int, ...]]:
        state, _ = classify_state(
            paragraph.text, strategy, threshold, models, combine_variant, r_variant
        )
        return state.B, state.V

    if workers <= 1:
        return [one(p) for p in dataset]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, dataset))


def evaluate(
    dataset: list[AnnotatedParagraph],
    strategy: StrategySpec,
    threshold: float,
    models: Models,
    seed: int = 0,
    combine_variant: str = "formula",
    r_variant: str = "square_of_mean",
    workers: int = 1,
) -> EvalReport:
    """Classify every paragraph and compute all four metrics.

    Fully deterministic given the seed: the Best-Ranked random fallback is
    drawn from one generator consumed in dataset order.
    """
    if not dataset:
        raise EmptyDataset("no samples")
    missing: set[str] = set()
    for paragraph in dataset:
        digest = canonical_digest(normalize(paragraph.text))
        if strategy.encoder_tag is not None:
            cache = models.cache_for(strategy.encoder_tag)
            if digest not in cache.entries:
                missing.add(digest)
    if strategy.encoder_tag is not None:
        cache = models.cache_for(strategy.encoder_tag)
        for text in models.corpus_texts:
            digest = canonical_digest(text)
            if digest not in cache.entries:
                missing.add(digest)
    if missing:
        raise CacheMiss(sorted(missing))

    outputs = classify_dataset(
        dataset, strategy, threshold, models, combine_variant, r_variant, workers
    )
    truth = [p.true_labels for p in dataset]
    scores = [b for b, _ in outputs]
    ranked = [v for _, v in outputs]
    predicted = [frozenset(v) for v in ranked]

    rng = random.Random(seed)
    pairs = [best_ranked_pair(t, v, rng) for t, v in zip(truth, ranked)]
    br_accuracy = sum(1 for yt, yp in pairs if yt == yp) / len(pairs)
    br_weighted = _weighted_f1_over_sets(
        [frozenset({yt}) for yt, _ in pairs], [frozenset({yp}) for _, yp in pairs]
    )

    nonempty = [t for t in truth if t]
    lrap_value = lrap(truth, scores) if nonempty else 0.0

    support: dict[str, int] = {"no_sdg": sum(1 for t in truth if not t)}
    for k in range(1, SDG_MAX + 1):
        support[str(k)] = sum(1 for t in truth if k in t)

    return EvalReport(
        lrap=lrap_value,
        weighted_f1=weighted_f1(truth, predicted),
        br_accuracy=br_accuracy,
        br_weighted_f1=br_weighted,
        per_class_support=support,
        class_distribution=class_distribution(truth),
        threshold=threshold,
        strategy=strategy.name,
        rng_seed=seed,
        n_samples=len(dataset),
        lrap_excluded=len(truth) - len(nonempty),
    )
