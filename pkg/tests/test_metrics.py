import json
import random

import numpy as np
import pytest

from conftest import orthonormal_text_vectors, uniform_token_vectors, write_sentence_cache, write_word_table
from sdgtag.classifier import Models, STRATEGIES
from sdgtag.embeddings import CacheMiss, load_sentence_cache, load_word_table
from sdgtag.metrics import (
    NO_SDG,
    AnnotatedParagraph,
    EmptyDataset,
    best_ranked,
    best_ranked_pair,
    class_distribution,
    evaluate,
    load_dataset,
    lrap,
    weighted_f1,
)


def scores_from_order(order):
    """Score vector whose descending sort reproduces the given goal order."""
    s = np.empty(17)
    for pos, goal in enumerate(order):
        s[goal - 1] = float(17 - pos)
    return s


def rest(used):
    return [k for k in range(1, 18) if k not in used]


# Six-sample hand dataset. Expected values were computed by enumerating
# ranks and per-label TP/FP/FN on paper and are re-derived below by the
# brute-force oracle.
HAND_ORDERS = [
    [5, 3] + rest({5, 3}),
    [16, 9, 3] + rest({16, 9, 3}),
    list(range(1, 18)),
    [9, 1, 4, 7] + rest({9, 1, 4, 7}),
    [17, 16] + rest({17, 16}),
    [6, 8, 10, 12, 2] + rest({6, 8, 10, 12, 2}),
]
HAND_TRUTH = [
    frozenset({5}),
    frozenset({3, 16}),
    frozenset(),
    frozenset({7}),
    frozenset({16, 17}),
    frozenset({2}),
]
HAND_SCORES = [scores_from_order(o) for o in HAND_ORDERS]
HAND_PREDICTED = [
    frozenset({5, 3}),
    frozenset({16, 3, 17}),
    frozenset(),
    frozenset({9}),
    frozenset({17}),
    frozenset(),
]
HAND_RANKED = [(5, 3), (16, 3, 17), (), (9,), (17,), ()]

EXPECTED_LRAP = 197 / 300
EXPECTED_WEIGHTED_F1 = 13 / 24
EXPECTED_BR_ACCURACY = 2 / 3
EXPECTED_BR_WEIGHTED_F1 = 11 / 18


def oracle_lrap(truth, scores):
    """Brute force: enumerate ranks directly from sorted score lists."""
    per_sample = []
    for labels, s in zip(truth, scores):
        if not labels:
            continue
        contributions = []
        for label in labels:
            rank = sum(1 for v in s if v >= s[label - 1])
            hits = sum(1 for other in labels if s[other - 1] >= s[label - 1])
            contributions.append(hits / rank)
        per_sample.append(sum(contributions) / len(contributions))
    return sum(per_sample) / len(per_sample)


def oracle_weighted_f1(truth_sets, pred_sets):
    """Brute force over the 18-label one-vs-rest confusion counts."""
    t = [s if s else {NO_SDG} for s in truth_sets]
    p = [s if s else {NO_SDG} for s in pred_sets]
    num, den = 0.0, 0
    for label in range(0, 18):
        tp = sum(1 for a, b in zip(t, p) if label in a and label in b)
        fp = sum(1 for a, b in zip(t, p) if label not in a and label in b)
        fn = sum(1 for a, b in zip(t, p) if label in a and label not in b)
        support = tp + fn
        f1 = 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) else 0.0
        num += support * f1
        den += support
    return num / den


class TestLrap:
    def test_hand_dataset_matches_frozen_value(self):
        got = lrap(HAND_TRUTH, HAND_SCORES)
        assert got == pytest.approx(EXPECTED_LRAP, abs=1e-9)
        assert got == pytest.approx(oracle_lrap(HAND_TRUTH, HAND_SCORES), abs=1e-12)

    def test_perfect_ranking(self):
        truth = [frozenset({1, 2}), frozenset({17})]
        scores = [scores_from_order([1, 2] + rest({1, 2})), scores_from_order([17] + rest({17}))]
        assert lrap(truth, scores) == pytest.approx(1.0, abs=1e-12)

    def test_single_label_second_rank(self):
        truth = [frozenset({4})]
        scores = [scores_from_order([9, 4] + rest({9, 4}))]
        assert lrap(truth, scores) == pytest.approx(0.5, abs=1e-12)

    def test_two_labels_first_and_third(self):
        truth = [frozenset({1, 2})]
        scores = [scores_from_order([1, 9, 2] + rest({1, 9, 2}))]
        assert lrap(truth, scores) == pytest.approx(5 / 6, abs=1e-12)

    def test_empty_truth_excluded(self):
        truth = [frozenset(), frozenset({4})]
        scores = [scores_from_order(list(range(1, 18)))] * 2
        assert lrap(truth, scores) == lrap([truth[1]], [scores[1]])

    def test_all_empty_raises(self):
        with pytest.raises(EmptyDataset):
            lrap([frozenset()], [scores_from_order(list(range(1, 18)))])

    def test_monotone_transformation_invariance(self):
        transformed = [np.exp(s / 5.0) for s in HAND_SCORES]
        assert lrap(HAND_TRUTH, transformed) == pytest.approx(EXPECTED_LRAP, abs=1e-12)

    def test_range(self):
        rng = random.Random(11)
        for _ in range(100):
            truth = [frozenset(rng.sample(range(1, 18), rng.randint(1, 4)))]
            scores = [np.array([rng.random() for _ in range(17)])]
            assert 0.0 <= lrap(truth, scores) <= 1.0


class TestWeightedF1:
    def test_hand_dataset_matches_frozen_value(self):
        got = weighted_f1(HAND_TRUTH, HAND_PREDICTED)
        assert got == pytest.approx(EXPECTED_WEIGHTED_F1, abs=1e-9)
        assert got == pytest.approx(oracle_weighted_f1(HAND_TRUTH, HAND_PREDICTED), abs=1e-12)

    def test_perfect_predictions(self):
        assert weighted_f1(HAND_TRUTH, HAND_TRUTH) == pytest.approx(1.0, abs=1e-12)

    def test_fully_disjoint_predictions(self):
        truth = [frozenset({1}), frozenset({2})]
        pred = [frozenset({3}), frozenset({4})]
        assert weighted_f1(truth, pred) == 0.0

    def test_equals_macro_f1_when_supports_equal(self):
        truth = [frozenset({1}), frozenset({2}), frozenset({3})]
        pred = [frozenset({1}), frozenset({9}), frozenset({3})]
        # per-label F1: 1, 0, 1 for the supported labels -> macro over them
        assert weighted_f1(truth, pred) == pytest.approx(2 / 3, abs=1e-12)

    def test_sklearn_agreement(self):
        sklearn = pytest.importorskip("sklearn.metrics")
        M_t = np.zeros((6, 18))
        M_p = np.zeros((6, 18))
        for i, (t, p) in enumerate(zip(HAND_TRUTH, HAND_PREDICTED)):
            for k in t or {NO_SDG}:
                M_t[i, k] = 1
            for k in p or {NO_SDG}:
                M_p[i, k] = 1
        expected = sklearn.f1_score(M_t, M_p, average="weighted", zero_division=0)
        assert weighted_f1(HAND_TRUTH, HAND_PREDICTED) == pytest.approx(expected, abs=1e-12)


class TestBestRanked:
    def test_intersection_takes_best_ranked(self):
        rng = random.Random(0)
        assert best_ranked(frozenset({3, 16}), (16, 3, 17), rng) == 16

    def test_singleton_fallback(self):
        rng = random.Random(0)
        assert best_ranked(frozenset({5}), (7, 9), rng) == 5

    def test_empty_empty_matches_no_sdg(self):
        rng = random.Random(0)
        assert best_ranked(frozenset(), (), rng) == NO_SDG

    def test_random_fallback_is_seeded(self):
        picks_a = [best_ranked(frozenset({1, 2, 3}), (9,), random.Random(42)) for _ in range(5)]
        picks_b = [best_ranked(frozenset({1, 2, 3}), (9,), random.Random(42)) for _ in range(5)]
        assert picks_a == picks_b

    def test_non_true_rank_order_irrelevant_when_intersecting(self):
        rng = random.Random(0)
        a = best_ranked(frozenset({3}), (9, 3, 11), rng)
        b = best_ranked(frozenset({3}), (11, 3, 9), rng)
        assert a == b == 3

    def test_pair_semantics(self):
        rng = random.Random(0)
        assert best_ranked_pair(frozenset({3, 16}), (16, 3), rng) == (16, 16)
        assert best_ranked_pair(frozenset({7}), (9,), rng) == (7, 9)
        assert best_ranked_pair(frozenset(), (), rng) == (NO_SDG, NO_SDG)
        assert best_ranked_pair(frozenset({2}), (), rng) == (2, NO_SDG)


class TestClassDistribution:
    def test_table_proportions(self):
        truth = (
            [frozenset()] * 288
            + [frozenset({16})] * 111
            + [frozenset({17})] * 133
            + [frozenset({(i % 15) + 1}) for i in range(468)]
        )
        dist = class_distribution(truth)
        assert dist["no_sdg"] == pytest.approx(0.288, abs=1e-3)
        assert dist["sdg16"] == pytest.approx(0.111, abs=1e-3)
        assert dist["sdg17"] == pytest.approx(0.133, abs=1e-3)
        assert dist["remaining"] == pytest.approx(0.468, abs=1e-3)
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)

    def test_multi_label_samples_count_each_label(self):
        dist = class_distribution([frozenset({16, 17})])
        assert dist["sdg16"] == 0.5
        assert dist["sdg17"] == 0.5


class TestEvaluate:
    def _models(self, corpus, tmp_path, query_map):
        texts = [d.text for d in corpus.documents]
        table = write_word_table(tmp_path / "w.tsv", 2, uniform_token_vectors(texts, [1.0, 0.0]))
        dim, vectors = orthonormal_text_vectors(corpus, extra_texts=query_map)
        cache = write_sentence_cache(tmp_path / "c.tsv", dim, "dan", vectors)
        return Models(
            corpus=corpus,
            word_table=load_word_table(table),
            caches={"dan": load_sentence_cache(cache)},
        )

    def _dataset(self, corpus):
        # bias-style queries route deterministically to their labeled goal
        return [
            AnnotatedParagraph("a", "sdg5", frozenset({5})),
            AnnotatedParagraph("b", "sdg16", frozenset({16})),
            AnnotatedParagraph("c", "sdg17", frozenset({17})),
        ]

    def test_perfect_classification_gives_all_ones(self, corpus, tmp_path):
        models = self._models(
            corpus, tmp_path, {f"sdg{k}": corpus.bias_index(k) for k in (5, 16, 17)}
        )
        report = evaluate(self._dataset(corpus), STRATEGIES["cdm_dan"], 0.6, models, seed=9)
        assert report.lrap == pytest.approx(1.0, abs=1e-9)
        assert report.weighted_f1 == pytest.approx(1.0, abs=1e-9)
        assert report.br_accuracy == pytest.approx(1.0, abs=1e-9)
        assert report.br_weighted_f1 == pytest.approx(1.0, abs=1e-9)
        assert report.n_samples == 3
        assert report.rng_seed == 9

    def test_deterministic_across_workers(self, corpus, tmp_path):
        models = self._models(
            corpus, tmp_path, {f"sdg{k}": corpus.bias_index(k) for k in (5, 16, 17)}
        )
        r1 = evaluate(self._dataset(corpus), STRATEGIES["cdm_dan"], 0.6, models, seed=1, workers=1)
        r4 = evaluate(self._dataset(corpus), STRATEGIES["cdm_dan"], 0.6, models, seed=1, workers=4)
        assert r1.to_json() == r4.to_json()

    def test_cache_miss_lists_all_missing(self, corpus, tmp_path):
        models = self._models(corpus, tmp_path, {})
        dataset = [
            AnnotatedParagraph("a", "uncached text one", frozenset({1})),
            AnnotatedParagraph("b", "uncached text two", frozenset({2})),
        ]
        with pytest.raises(CacheMiss) as err:
            evaluate(dataset, STRATEGIES["cdm_dan"], 0.6, models)
        assert len(err.value.digests) == 2

    def test_report_json_fields(self, corpus, tmp_path):
        models = self._models(corpus, tmp_path, {"sdg5": corpus.bias_index(5)})
        dataset = [AnnotatedParagraph("a", "sdg5", frozenset({5}))]
        report = evaluate(dataset, STRATEGIES["cdm_dan"], 0.6, models, seed=3)
        payload = json.loads(report.to_json())
        assert payload["strategy"] == "cdm_dan"
        assert payload["threshold"] == 0.6
        assert payload["per_class_support"]["5"] == 1
        assert sum(payload["class_distribution"].values()) == pytest.approx(1.0, abs=1e-9)


def test_load_dataset_roundtrip(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text(
        '{"source_id": "x", "text": "end poverty", "labels": [1, 5]}\n'
        '{"source_id": "y", "text": "nothing here", "labels": []}\n',
        "utf-8",
    )
    dataset = load_dataset(path)
    assert dataset[0].true_labels == frozenset({1, 5})
    assert dataset[1].true_labels == frozenset()


def test_load_dataset_rejects_bad_labels(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text('{"source_id": "x", "text": "t", "labels": [19]}\n', "utf-8")
    with pytest.raises(ValueError):
        load_dataset(path)
