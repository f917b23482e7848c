"""Sentence encoder backends.

The tfhub backend wraps the published Universal Sentence Encoder models and
needs network access on first load. The hashed backend derives a
deterministic unit vector from each text's digest; it carries no semantics
but is bit-stable across platforms, which makes it the right tool for
fixtures, integration tests and air-gapped format checks.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from typing import Protocol

TFHUB_MODELS = {
    "dan": "https://tfhub.dev/google/universal-sentence-encoder/4",
    "transformer": "https://tfhub.dev/google/universal-sentence-encoder-large/5",
}


class EncoderUnavailable(RuntimeError):
    pass


class SentenceEncoder(Protocol):
    dimension: int
    backend: str
    model_ref: str

    def encode(self, texts: list[str]) -> list[list[float]]: ...


@dataclass
class HashedEncoder:
    """Deterministic pseudo-embedding: unit vector seeded by the text digest."""

    dimension: int = 512
    backend: str = "hashed"
    model_ref: str = "hashed-v1"

    def encode(self, texts: list[str]) -> list[list[float]]:
        return [self._one(text) for text in texts]

    def _one(self, text: str) -> list[float]:
        seed = hashlib.sha256(text.encode("utf-8")).digest()
        values: list[float] = []
        counter = 0
        while len(values) < self.dimension:
            block = hashlib.sha256(seed + struct.pack("<I", counter)).digest()
            for i in range(0, len(block) - 3, 4):
                (word,) = struct.unpack_from("<I", block, i)
                values.append(word / 2147483647.5 - 1.0)  # uint32 -> [-1, 1]
                if len(values) == self.dimension:
                    break
            counter += 1
        norm = sum(v * v for v in values) ** 0.5
        return [v / norm for v in values]


@dataclass
class TfHubEncoder:
    """Universal Sentence Encoder loaded from TensorFlow Hub."""

    tag: str
    backend: str = "tfhub"
    model_ref: str = ""
    dimension: int = 512
    _model: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.tag not in TFHUB_MODELS:
            raise EncoderUnavailable(f"no published model for tag {self.tag!r}")
        self.model_ref = TFHUB_MODELS[self.tag]
        try:
            import tensorflow_hub as hub
        except ImportError as exc:
            raise EncoderUnavailable(
                "tensorflow_hub is not installed; install the 'tfhub' extra"
            ) from exc
        try:
            self._model = hub.load(self.model_ref)
        except Exception as exc:
            raise EncoderUnavailable(f"could not load {self.model_ref}: {exc}") from exc

    def encode(self, texts: list[str]) -> list[list[float]]:
        embedded = self._model(texts).numpy()
        self.dimension = int(embedded.shape[1])
        return [row.astype(float).tolist() for row in embedded]


def make_encoder(backend: str, tag: str, dimension: int = 512):
    if backend == "hashed":
        return HashedEncoder(dimension=dimension)
    if backend == "tfhub":
        return TfHubEncoder(tag=tag)
    raise EncoderUnavailable(f"unknown backend {backend!r}")
