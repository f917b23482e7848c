"""Word-vector subset extraction and sentence-cache export.

File contracts (shared with the classifier, re-stated here because this
package deliberately does not import it):

- digest manifest: one row per required text, "sha256-hex<TAB>canonical
  text", where the canonical text is whitespace-trimmed with internal runs
  collapsed to single spaces and the digest is the SHA-256 of its UTF-8
  bytes.
- word table: line 1 is the integer dimension, then "token<TAB>f1 f2 ...".
- sentence cache: line 1 is "dimension<TAB>encoder_tag", then
  "digest<TAB>f1 ...". Rows are order-insensitive and append-only.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .encoders import SentenceEncoder

ENCODER_TAGS = ("dan", "transformer")


class ManifestError(ValueError):
    pass


class DigestMismatch(ManifestError):
    pass


class SourceVectorsError(ValueError):
    pass


@dataclass(frozen=True)
class ExportManifest:
    """Paths driving one export run."""

    digests_path: Path
    texts_path: Path | None = None  # raw JSONL, optional extra token source
    word_table_out: Path | None = None
    sentence_cache_outs: dict[str, Path] = field(default_factory=dict)


def canonical_text(text: str) -> str:
    return " ".join(text.split())


def canonical_digest(text: str) -> str:
    return hashlib.sha256(canonical_text(text).encode("utf-8")).hexdigest()


def read_manifest(path: Path) -> dict[str, str]:
    """digest -> text, verifying every digest against its carried text."""
    rows: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        digest, sep, text = line.partition("\t")
        if not sep:
            raise ManifestError(f"{path}:{lineno}: expected 'digest<TAB>text'")
        if canonical_digest(text) != digest:
            raise DigestMismatch(f"{path}:{lineno}: digest does not match its text")
        rows[digest] = canonical_text(text)
    return rows


def _manifest_tokens(manifest: ExportManifest) -> set[str]:
    tokens = {t for text in read_manifest(manifest.digests_path).values() for t in text.split()}
    if manifest.texts_path is not None:
        for lineno, line in enumerate(
            Path(manifest.texts_path).read_text("utf-8").splitlines(), start=1
        ):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{manifest.texts_path}:{lineno}: bad JSON: {exc}") from None
            tokens.update(str(record.get("text", "")).lower().split())
    return tokens


def read_source_vectors(path: Path) -> tuple[int, dict[str, list[float]]]:
    """Parse a published word-vector dump.

    Accepts the common text layouts: headerless GloVe rows ("token f1 ..."),
    or a word2vec-style "count dimension" first line. Duplicate tokens keep
    their first occurrence.
    """
    lines = Path(path).read_text("utf-8").splitlines()
    start = 0
    if lines:
        head = lines[0].split()
        if len(head) == 2 and all(p.lstrip("-").isdigit() for p in head):
            start = 1
    dimension = 0
    vectors: dict[str, list[float]] = {}
    for lineno, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        parts = line.rstrip("\n").split(" ")
        token = parts[0]
        try:
            values = [float(p) for p in parts[1:] if p]
        except ValueError as exc:
            raise SourceVectorsError(f"{path}:{lineno}: {exc}") from None
        if not token or not values:
            raise SourceVectorsError(f"{path}:{lineno}: expected 'token f1 f2 ...'")
        if dimension == 0:
            dimension = len(values)
        elif len(values) != dimension:
            raise SourceVectorsError(
                f"{path}:{lineno}: expected {dimension} components, got {len(values)}"
            )
        vectors.setdefault(token, values)
    if dimension == 0:
        raise SourceVectorsError(f"{path}: no vectors found")
    return dimension, vectors


def export_word_subset(manifest: ExportManifest, source_path: Path) -> Path:
    """Write the word table holding only tokens the required texts use.

    Output rows are sorted by token, so re-exporting over identical inputs
    is byte-identical.
    """
    if manifest.word_table_out is None:
        raise ManifestError("no word-table output path configured")
    dimension, source = read_source_vectors(source_path)
    needed = sorted(token for token in _manifest_tokens(manifest) if token in source)
    lines = [str(dimension)]
    for token in needed:
        lines.append(token + "\t" + " ".join(repr(v) for v in source[token]))
    out = manifest.word_table_out
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n", "utf-8")
    _write_provenance(
        out,
        {
            "artifact": "word_table",
            "source": str(source_path),
            "dimension": dimension,
            "rows": len(needed),
        },
    )
    return out


def export_sentences(manifest: ExportManifest, encoder_tag: str, encoder: SentenceEncoder) -> Path:
    """Encode every manifest text and write the sentence cache for one tag.

    One row per digest; duplicates in the manifest collapse beforehand
    because rows are keyed by digest. The file is rewritten whole and sorted
    by digest, which keeps re-exports byte-identical.
    """
    if encoder_tag not in ENCODER_TAGS:
        raise ManifestError(f"unknown encoder tag {encoder_tag!r}")
    out = manifest.sentence_cache_outs.get(encoder_tag)
    if out is None:
        raise ManifestError(f"no sentence-cache output path configured for {encoder_tag!r}")

    rows = read_manifest(manifest.digests_path)
    digests = sorted(rows)
    vectors = encoder.encode([rows[d] for d in digests])

    lines = [f"{encoder.dimension}\t{encoder_tag}"]
    for digest, vector in zip(digests, vectors):
        lines.append(digest + "\t" + " ".join(repr(float(v)) for v in vector))
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n", "utf-8")
    _write_provenance(
        out,
        {
            "artifact": "sentence_cache",
            "encoder_tag": encoder_tag,
            "backend": encoder.backend,
            "model_ref": encoder.model_ref,
            "dimension": encoder.dimension,
            "rows": len(digests),
        },
    )
    return out


def _write_provenance(artifact: Path, payload: dict) -> None:
    # Pinned alongside every artifact so embedding drift stays visible.
    sidecar = artifact.with_name(artifact.name + ".provenance.json")
    sidecar.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", "utf-8")
