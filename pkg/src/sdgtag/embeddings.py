"""File-backed dense-vector stores for word and sentence embeddings.

No ML runtime is involved: word vectors and sentence-encoder outputs are
pre-computed by an external exporter and loaded from plain text files.
Sentence vectors are keyed by the SHA-256 digest of the whitespace-canonical
text, so the cache and its producers only need to agree on the file format.

Word-table format: line 1 is the integer dimension; every following line is
"token<TAB>f1 f2 ... fd". Sentence-cache format: line 1 is
"dimension<TAB>encoder_tag"; every following line is "digest<TAB>f1 ... fd".
Both are UTF-8, append-only and order-insensitive.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

ENCODER_TAGS = ("dan", "transformer")


class EmbeddingFileError(ValueError):
    pass


class BadHeader(EmbeddingFileError):
    pass


class DimensionMismatch(EmbeddingFileError):
    pass


class DuplicateToken(EmbeddingFileError):
    pass


class CacheMiss(LookupError):
    """A text's digest is absent from the sentence cache.

    Signals that the exporter must be rerun over the dataset; the missing
    digests are carried for the preflight report.
    """

    def __init__(self, digests: list[str]):
        self.digests = digests
        shown = ", ".join(digests[:3]) + ("..." if len(digests) > 3 else "")
        super().__init__(f"{len(digests)} digest(s) missing from sentence cache: {shown}")


@dataclass(frozen=True)
class EmbeddingTable:
    dimension: int
    vectors: dict[str, np.ndarray]


@dataclass(frozen=True)
class SentenceCache:
    dimension: int
    encoder_tag: str
    entries: dict[str, np.ndarray]


def canonical_text(text: str) -> str:
    """Trim and collapse internal whitespace runs to single spaces."""
    return " ".join(text.split())


def canonical_digest(text: str) -> str:
    """SHA-256 hex digest of the canonical form of a text."""
    return hashlib.sha256(canonical_text(text).encode("utf-8")).hexdigest()


def _parse_vector(parts: list[str], dimension: int, lineno: int) -> np.ndarray:
    if len(parts) != dimension:
        raise DimensionMismatch(
            f"line {lineno}: expected {dimension} components, got {len(parts)}"
        )
    try:
        vec = np.array([float(p) for p in parts], dtype=np.float64)
    except ValueError as exc:
        raise EmbeddingFileError(f"line {lineno}: {exc}") from None
    if not np.all(np.isfinite(vec)):
        raise EmbeddingFileError(f"line {lineno}: non-finite vector component")
    return vec


def load_word_table(path: str | Path) -> EmbeddingTable:
    """Parse a word-table file; duplicate tokens are rejected."""
    lines = Path(path).read_text("utf-8").splitlines()
    if not lines:
        raise BadHeader(f"{path}: empty file, expected a dimension header")
    try:
        dimension = int(lines[0].strip())
    except ValueError:
        raise BadHeader(f"{path}: first line must be the integer dimension") from None
    if dimension <= 0:
        raise BadHeader(f"{path}: dimension must be positive, got {dimension}")

    vectors: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        token, _, rest = line.partition("\t")
        if not token or not rest:
            raise EmbeddingFileError(f"line {lineno}: expected 'token<TAB>floats'")
        if token in vectors:
            raise DuplicateToken(f"line {lineno}: duplicate token {token!r}")
        vectors[token] = _parse_vector(rest.split(), dimension, lineno)
    return EmbeddingTable(dimension=dimension, vectors=vectors)


def load_sentence_cache(path: str | Path) -> SentenceCache:
    """Parse a sentence-cache file."""
    lines = Path(path).read_text("utf-8").splitlines()
    if not lines:
        raise BadHeader(f"{path}: empty file, expected 'dimension<TAB>encoder_tag'")
    dim_part, _, tag = lines[0].partition("\t")
    try:
        dimension = int(dim_part.strip())
    except ValueError:
        raise BadHeader(f"{path}: header must start with the integer dimension") from None
    tag = tag.strip()
    if dimension <= 0 or tag not in ENCODER_TAGS:
        raise BadHeader(f"{path}: bad header {lines[0]!r}")

    entries: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        digest, _, rest = line.partition("\t")
        if not digest or not rest:
            raise EmbeddingFileError(f"line {lineno}: expected 'digest<TAB>floats'")
        entries[digest] = _parse_vector(rest.split(), dimension, lineno)
    return SentenceCache(dimension=dimension, encoder_tag=tag, entries=entries)


def awe(tokens: list[str], table: EmbeddingTable) -> np.ndarray:
    """Average word embedding: componentwise mean over token instances.

    Tokens missing from the table are skipped; if nothing is left the zero
    vector is returned.
    """
    hits = [table.vectors[t] for t in tokens if t in table.vectors]
    if not hits:
        return np.zeros(table.dimension, dtype=np.float64)
    return np.mean(hits, axis=0)


def sentence_embedding(cache: SentenceCache, text: str) -> np.ndarray:
    """Cached sentence vector for a text; raises CacheMiss when absent."""
    digest = canonical_digest(text)
    vec = cache.entries.get(digest)
    if vec is None:
        raise CacheMiss([digest])
    return vec


def dense_cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two dense vectors; 0 when either has zero norm."""
    if a.shape != b.shape:
        raise DimensionMismatch(f"vector dimensions differ: {a.shape} vs {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return float(np.dot(a, b) / (norm_a * norm_b))
