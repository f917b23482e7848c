"""Command-line entry points: word-subset and sentences."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .encoders import EncoderUnavailable, make_encoder
from .exporter import (
    ENCODER_TAGS,
    ExportManifest,
    ManifestError,
    SourceVectorsError,
    export_sentences,
    export_word_subset,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdg-embed-export", description=__doc__)
    parser.add_argument("--manifest", required=True, help="digest manifest (digest<TAB>text)")
    parser.add_argument("--texts", help="raw paragraphs JSONL, extra token source")
    sub = parser.add_subparsers(dest="command", required=True)

    p_words = sub.add_parser("word-subset", help="prune a word-vector dump to the needed tokens")
    p_words.add_argument("--source-vectors", required=True, help="published embedding text dump")
    p_words.add_argument("--out", required=True, help="word-table output path")

    p_sent = sub.add_parser("sentences", help="encode all manifest texts into a sentence cache")
    p_sent.add_argument("--encoder-tag", choices=ENCODER_TAGS, required=True)
    p_sent.add_argument("--backend", choices=("tfhub", "hashed"), default="tfhub")
    p_sent.add_argument("--dimension", type=int, default=512, help="hashed backend only")
    p_sent.add_argument("--out", required=True, help="sentence-cache output path")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    texts = Path(args.texts) if args.texts else None
    try:
        if args.command == "word-subset":
            manifest = ExportManifest(
                digests_path=Path(args.manifest), texts_path=texts, word_table_out=Path(args.out)
            )
            out = export_word_subset(manifest, Path(args.source_vectors))
        else:
            manifest = ExportManifest(
                digests_path=Path(args.manifest),
                texts_path=texts,
                sentence_cache_outs={args.encoder_tag: Path(args.out)},
            )
            encoder = make_encoder(args.backend, args.encoder_tag, args.dimension)
            out = export_sentences(manifest, args.encoder_tag, encoder)
    except (ManifestError, SourceVectorsError, EncoderUnavailable, OSError) as exc:
        print(f"sdg-embed-export: error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
