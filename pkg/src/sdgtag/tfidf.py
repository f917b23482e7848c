"""Fixed-dictionary TF-IDF model over the 34-document SDG corpus.

The corpus holds two documents per goal: a class document (the official
description plus the goal's id token) and a bias document (the id token
alone), interleaved as class_1, bias_1, class_2, bias_2, ... Queries are
vectorized against the dictionary frozen at build time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .preprocess import SDG_MAX, SDG_MIN, ProcessedDocument, normalize, process

N_DOCUMENTS = 2 * SDG_MAX


class CorpusError(ValueError):
    pass


class DuplicateSdgId(CorpusError):
    pass


class MissingSdgId(CorpusError):
    pass


class EmptyCorpus(CorpusError):
    pass


@dataclass(frozen=True)
class SdgDefinition:
    sdg_id: int
    title: str
    description: str


@dataclass(frozen=True)
class CorpusDocument:
    sdg_id: int
    kind: str  # "class" or "bias"
    text: str  # normalized surface text, input to the embedding side
    processed: ProcessedDocument


@dataclass(frozen=True)
class Corpus:
    documents: tuple[CorpusDocument, ...]

    @property
    def n(self) -> int:
        return len(self.documents)

    def class_index(self, sdg_id: int) -> int:
        return 2 * (sdg_id - 1)

    def bias_index(self, sdg_id: int) -> int:
        return 2 * (sdg_id - 1) + 1


@dataclass(frozen=True)
class SparseVector:
    """Index -> weight map; zero entries are never stored."""

    entries: dict[int, float]

    def norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.entries.values()))


@dataclass(frozen=True)
class TfIdfModel:
    vocabulary: dict[str, int]  # token -> column index, frozen at build
    idf: tuple[float, ...]
    doc_vectors: tuple[SparseVector, ...]

    @property
    def n_documents(self) -> int:
        return len(self.doc_vectors)


def load_definitions(path: str | Path | None = None) -> list[SdgDefinition]:
    """Load SDG definitions from JSON; defaults to the bundled official texts."""
    if path is None:
        raw = resources.files("sdgtag.data").joinpath("sdg_definitions.json").read_text("utf-8")
    else:
        raw = Path(path).read_text("utf-8")
    items = json.loads(raw)
    return [
        SdgDefinition(sdg_id=int(d["id"]), title=str(d["title"]), description=str(d["description"]))
        for d in items
    ]


def build_corpus(definitions: list[SdgDefinition]) -> Corpus:
    """Assemble the interleaved class/bias corpus from 17 definitions."""
    by_id: dict[int, SdgDefinition] = {}
    for d in definitions:
        if d.sdg_id in by_id:
            raise DuplicateSdgId(f"sdg id {d.sdg_id} appears more than once")
        by_id[d.sdg_id] = d
    missing = [k for k in range(SDG_MIN, SDG_MAX + 1) if k not in by_id]
    if missing:
        raise MissingSdgId(f"missing sdg ids: {missing}")
    extra = sorted(set(by_id) - set(range(SDG_MIN, SDG_MAX + 1)))
    if extra:
        raise CorpusError(f"sdg ids out of range: {extra}")

    documents = []
    for k in range(SDG_MIN, SDG_MAX + 1):
        class_text = normalize(f"{by_id[k].description} sdg{k}")
        bias_text = f"sdg{k}"
        documents.append(
            CorpusDocument(sdg_id=k, kind="class", text=class_text, processed=process(class_text))
        )
        documents.append(
            CorpusDocument(sdg_id=k, kind="bias", text=bias_text, processed=process(bias_text))
        )
    return Corpus(documents=tuple(documents))


def fit_documents(docs: list[ProcessedDocument]) -> TfIdfModel:
    """Build a TF-IDF model over an arbitrary document list.

    Vocabulary is the alphabetically ordered set of distinct tokens. IDF uses
    the smoothed form ln((1+N)/(1+df)) + 1, and document vectors are raw term
    count times IDF, L2-normalized.
    """
    if not docs:
        raise EmptyCorpus("cannot fit a model on zero documents")
    vocabulary = {token: i for i, token in enumerate(sorted({t for d in docs for t in d.tokens}))}
    n = len(docs)
    df = [0] * len(vocabulary)
    for doc in docs:
        for token in set(doc.tokens):
            df[vocabulary[token]] += 1
    idf = tuple(math.log((1 + n) / (1 + d)) + 1.0 for d in df)
    model = TfIdfModel(vocabulary=vocabulary, idf=idf, doc_vectors=())
    vectors = tuple(vectorize(model, doc) for doc in docs)
    return TfIdfModel(vocabulary=vocabulary, idf=idf, doc_vectors=vectors)


def build_model(corpus: Corpus) -> TfIdfModel:
    """Build the TF-IDF model once over the full 34-document corpus."""
    if corpus.n == 0:
        raise EmptyCorpus("corpus has no documents")
    return fit_documents([d.processed for d in corpus.documents])


def vectorize(model: TfIdfModel, doc: ProcessedDocument) -> SparseVector:
    """TF-IDF vector of a document under the fixed dictionary.

    Out-of-vocabulary tokens are ignored; an all-OOV document yields an
    empty vector.
    """
    counts: dict[int, int] = {}
    for token in doc.tokens:
        idx = model.vocabulary.get(token)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    if not counts:
        return SparseVector(entries={})
    weighted = {idx: c * model.idf[idx] for idx, c in counts.items()}
    norm = math.sqrt(sum(v * v for v in weighted.values()))
    return SparseVector(entries={idx: v / norm for idx, v in weighted.items()})


def sparse_cosine(a: SparseVector, b: SparseVector) -> float:
    """Cosine similarity of two sparse vectors; 0 when either is empty."""
    if not a.entries or not b.entries:
        return 0.0
    small, large = (a.entries, b.entries) if len(a.entries) <= len(b.entries) else (b.entries, a.entries)
    dot = sum(v * large[i] for i, v in small.items() if i in large)
    if dot == 0.0:
        return 0.0
    return dot / (a.norm() * b.norm())


def dump_model(model: TfIdfModel, corpus: Corpus) -> str:
    """Serialize the model to versioned JSON for inspection, deterministically."""
    tokens = sorted(model.vocabulary, key=model.vocabulary.get)
    payload = {
        "format_version": 1,
        "n_documents": model.n_documents,
        "vocabulary": tokens,
        "idf": list(model.idf),
        "documents": [
            {
                "sdg_id": doc.sdg_id,
                "kind": doc.kind,
                "vector": {str(i): v for i, v in sorted(vec.entries.items())},
            }
            for doc, vec in zip(corpus.documents, model.doc_vectors)
        ],
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
