"""Command-line surface: build, preflight, classify, evaluate, sweep, emit-akn.

Configuration precedence is flags over SDGTAG_* environment variables over a
JSON config file over built-in defaults. Exit codes: 0 ok, 1 usage, 2 data
error, 3 sentence cache incomplete.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import aknxml, metrics
from .classifier import DEFAULT_THRESHOLD, Models, StrategySpec, STRATEGIES
from .embeddings import (
    CacheMiss,
    EmbeddingFileError,
    canonical_digest,
    canonical_text,
    load_sentence_cache,
    load_word_table,
)
from .metrics import AnnotatedParagraph, classify_dataset, evaluate, load_dataset
from .preprocess import normalize
from .similarity import COMBINE_VARIANTS, R_VARIANTS
from .tfidf import CorpusError, build_corpus, build_model, dump_model, load_definitions

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CACHE = 3

ENV_PREFIX = "SDGTAG_"

METRIC_COLUMNS = ("lrap", "weighted_f1", "br_accuracy", "br_weighted_f1")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    sdg_defs: str | None = None  # None selects the bundled official texts
    word_table: str | None = None
    dan_cache: str | None = None
    transformer_cache: str | None = None
    strategy: str = "cdm_dan"
    threshold: float = DEFAULT_THRESHOLD
    seed: int = 0
    workers: int = 0  # 0 means available parallelism
    combine_variant: str = "formula"
    r_variant: str = "square_of_mean"

    def effective_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)


_CASTS = {"threshold": float, "seed": int, "workers": int}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config file, environment and flags, in that order."""
    config = RunConfig()
    known = {f.name for f in fields(RunConfig)}

    config_path = getattr(args, "config", None) or os.environ.get(ENV_PREFIX + "CONFIG")
    if config_path:
        try:
            loaded = json.loads(Path(config_path).read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {config_path}: {exc}") from None
        unknown = sorted(set(loaded) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {unknown}")
        for key, value in loaded.items():
            setattr(config, key, _CASTS.get(key, lambda v: v)(value))

    for key in known:
        raw = os.environ.get(ENV_PREFIX + key.upper())
        if raw is not None:
            try:
                setattr(config, key, _CASTS.get(key, lambda v: v)(raw))
            except ValueError:
                raise UsageError(f"bad value for {ENV_PREFIX + key.upper()}: {raw!r}") from None

    for key in known:
        value = getattr(args, key, None)
        if value is not None:
            setattr(config, key, value)

    if config.strategy not in STRATEGIES:
        raise UsageError(
            f"unknown strategy {config.strategy!r}; choose from {sorted(STRATEGIES)}"
        )
    if config.combine_variant not in COMBINE_VARIANTS:
        raise UsageError(f"unknown combine variant {config.combine_variant!r}")
    if config.r_variant not in R_VARIANTS:
        raise UsageError(f"unknown R variant {config.r_variant!r}")
    return config


def load_models(config: RunConfig, strategies: list[StrategySpec]) -> Models:
    """Load every artifact the requested strategies can touch.

    Paths are only required when some strategy needs them; the TF-IDF model
    itself is built lazily inside Models so baselines never trigger it.
    """
    corpus = build_corpus(load_definitions(config.sdg_defs))
    models = Models(corpus=corpus)

    need_word_table = any(s.uses_tfidf or s.name == "awe_baseline" for s in strategies)
    if need_word_table:
        if config.word_table is None:
            raise UsageError("--word-table is required for this strategy")
        models.word_table = load_word_table(config.word_table)

    for tag, path_opt in (("dan", config.dan_cache), ("transformer", config.transformer_cache)):
        if any(s.encoder_tag == tag for s in strategies):
            if path_opt is None:
                raise UsageError(f"--{tag}-cache is required for this strategy")
            cache = load_sentence_cache(path_opt)
            if cache.encoder_tag != tag:
                raise UsageError(f"{path_opt} holds {cache.encoder_tag!r} vectors, expected {tag!r}")
            models.caches[tag] = cache
    return models


def _read_paragraphs(path: str) -> list[dict]:
    """Input JSONL for classify/preflight: {"source_id", "text", ...} per line."""
    records = []
    text = sys.stdin.read() if path == "-" else Path(path).read_text("utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{lineno}: bad JSON: {exc}") from None
        if "text" not in record:
            raise ValueError(f"{path}:{lineno}: record has no 'text' field")
        record.setdefault("source_id", f"p{lineno}")
        records.append(record)
    return records


def _required_digests(models: Models, texts: list[str]) -> dict[str, str]:
    """digest -> canonical normalized text, for the corpus plus given texts."""
    required: dict[str, str] = {}
    for text in [*models.corpus_texts, *(normalize(t) for t in texts)]:
        required[canonical_digest(text)] = canonical_text(text)
    return required


def _write_manifest(path: str, rows: dict[str, str]) -> None:
    lines = [f"{digest}\t{text}" for digest, text in sorted(rows.items())]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), "utf-8")


def cmd_build(args: argparse.Namespace, config: RunConfig) -> int:
    corpus = build_corpus(load_definitions(config.sdg_defs))
    model = build_model(corpus)
    Path(args.out_model).write_text(dump_model(model, corpus), "utf-8")
    manifest = {canonical_digest(t): canonical_text(t) for t in (d.text for d in corpus.documents)}
    _write_manifest(args.out_manifest, manifest)
    print(
        f"model: {len(model.vocabulary)} terms, {model.n_documents} documents -> {args.out_model}"
    )
    print(f"corpus digest manifest: {len(manifest)} entries -> {args.out_manifest}")
    return EXIT_OK


def cmd_preflight(args: argparse.Namespace, config: RunConfig) -> int:
    models = load_models(config, [])
    records = _read_paragraphs(args.texts)
    required = _required_digests(models, [r["text"] for r in records])

    caches = []
    for path_opt in (config.dan_cache, config.transformer_cache):
        if path_opt and Path(path_opt).exists():
            caches.append(load_sentence_cache(path_opt))
    if caches:
        missing = {
            d: t for d, t in required.items() if any(d not in c.entries for c in caches)
        }
    else:
        missing = required

    _write_manifest(args.out_manifest, missing)
    print(f"{len(missing)} missing")
    return EXIT_OK if not missing else EXIT_CACHE


def _strategy(config: RunConfig) -> StrategySpec:
    return STRATEGIES[config.strategy]


def _precheck_cache(models: Models, strategy: StrategySpec, texts: list[str]) -> None:
    if strategy.encoder_tag is None:
        return
    cache = models.cache_for(strategy.encoder_tag)
    required = _required_digests(models, texts)
    missing = sorted(d for d in required if d not in cache.entries)
    if missing:
        raise CacheMiss(missing)


def cmd_classify(args: argparse.Namespace, config: RunConfig) -> int:
    strategy = _strategy(config)
    models = load_models(config, [strategy])
    records = _read_paragraphs(args.input)
    _precheck_cache(models, strategy, [r["text"] for r in records])

    dataset = [
        AnnotatedParagraph(source_id=r["source_id"], text=r["text"], true_labels=frozenset())
        for r in records
    ]
    outputs = classify_dataset(
        dataset,
        strategy,
        config.threshold,
        models,
        config.combine_variant,
        config.r_variant,
        workers=config.effective_workers(),
    )

    out_lines = []
    for record, (scores, ranked) in zip(records, outputs):
        out_lines.append(
            json.dumps(
                {
                    "source_id": record["source_id"],
                    "labels": [[k, float(scores[k - 1])] for k in ranked],
                    "is_unrelated": not ranked,
                },
                sort_keys=True,
            )
        )
    payload = "\n".join(out_lines) + ("\n" if out_lines else "")
    if args.output == "-":
        sys.stdout.write(payload)
    else:
        Path(args.output).write_text(payload, "utf-8")

    if args.akn is not None:
        if args.akn == "" and args.output == "-":
            raise UsageError("--akn needs an explicit directory when --output is stdout")
        akn_dir = args.akn if args.akn != "" else f"{args.output}.akn"
        _write_akn(Path(akn_dir), records, outputs)
    return EXIT_OK


def _write_akn(out_dir: Path, records: list[dict], outputs) -> None:
    """One fragment file per source document, paragraphs grouped by doc_id."""
    out_dir.mkdir(parents=True, exist_ok=True)
    by_doc: dict[str, list[tuple[str, object]]] = {}
    counters: dict[str, int] = {}
    for record, (scores, ranked) in zip(records, outputs):
        doc_id = str(record.get("doc_id", "doc"))
        counters[doc_id] = counters.get(doc_id, 0) + 1
        eid = str(record.get("eId", f"para_{counters[doc_id]}"))
        by_doc.setdefault(doc_id, []).append((eid, (scores, ranked)))

    for doc_id, items in by_doc.items():
        per_goal: dict[int, list[str]] = {}
        confidences: dict[int, dict[str, float]] = {}
        for eid, (scores, ranked) in items:
            for k in ranked:
                per_goal.setdefault(k, []).append(eid)
                confidences.setdefault(k, {})[eid] = float(scores[k - 1])
        entries = tuple(
            aknxml.AknEntry(
                sdg_key=f"goal_{k}",
                paragraph_refs=tuple(per_goal[k]),
                confidences=confidences[k],
            )
            for k in sorted(per_goal)
        )
        annotation = aknxml.AknAnnotation(entries=entries)
        (out_dir / f"{doc_id}.akn.xml").write_text(aknxml.emit_all(annotation), "utf-8")


def cmd_emit_akn(args: argparse.Namespace, config: RunConfig) -> int:
    strategy = _strategy(config)
    models = load_models(config, [strategy])
    records = _read_paragraphs(args.input)
    _precheck_cache(models, strategy, [r["text"] for r in records])
    dataset = [
        AnnotatedParagraph(source_id=r["source_id"], text=r["text"], true_labels=frozenset())
        for r in records
    ]
    outputs = classify_dataset(
        dataset,
        strategy,
        config.threshold,
        models,
        config.combine_variant,
        config.r_variant,
        workers=config.effective_workers(),
    )
    _write_akn(Path(args.out_dir), records, outputs)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace, config: RunConfig) -> int:
    strategy = _strategy(config)
    models = load_models(config, [strategy])
    dataset = load_dataset(args.dataset)
    report = evaluate(
        dataset,
        strategy,
        config.threshold,
        models,
        seed=config.seed,
        combine_variant=config.combine_variant,
        r_variant=config.r_variant,
        workers=config.effective_workers(),
    )
    if args.output == "-":
        sys.stdout.write(report.to_json())
    else:
        Path(args.output).write_text(report.to_json(), "utf-8")
    return EXIT_OK


def _parse_thresholds(raw: str) -> list[float]:
    try:
        values = [float(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"bad threshold list: {raw!r}") from None
    if not values:
        raise UsageError("empty threshold list")
    return values


def cmd_sweep(args: argparse.Namespace, config: RunConfig) -> int:
    names = [part.strip() for part in args.strategies.split(",") if part.strip()]
    unknown = sorted(set(names) - set(STRATEGIES))
    if unknown:
        raise UsageError(f"unknown strategies: {unknown}")
    strategies = [STRATEGIES[name] for name in dict.fromkeys(names)]
    thresholds = _parse_thresholds(args.thresholds)

    models = load_models(config, strategies)
    dataset = load_dataset(args.dataset)

    rows = []
    for strategy in strategies:
        for threshold in thresholds:
            report = evaluate(
                dataset,
                strategy,
                threshold,
                models,
                seed=config.seed,
                combine_variant=config.combine_variant,
                r_variant=config.r_variant,
                workers=config.effective_workers(),
            )
            predicted = classify_dataset(
                dataset,
                strategy,
                threshold,
                models,
                config.combine_variant,
                config.r_variant,
                workers=config.effective_workers(),
            )
            rows.append(
                {
                    "strategy": strategy.name,
                    "threshold": threshold,
                    "lrap": report.lrap,
                    "weighted_f1": report.weighted_f1,
                    "br_accuracy": report.br_accuracy,
                    "br_weighted_f1": report.br_weighted_f1,
                    "predicted_labels": sum(len(v) for _, v in predicted),
                }
            )
    rows.sort(key=lambda r: (r["strategy"], r["threshold"]))

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "sweep.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["strategy", "threshold", *METRIC_COLUMNS, "predicted_labels"])
        for row in rows:
            writer.writerow(
                [
                    row["strategy"],
                    row["threshold"],
                    *(row[m] for m in METRIC_COLUMNS),
                    row["predicted_labels"],
                ]
            )

    # One curve file per metric: thresholds down the rows, strategies across.
    ordered_names = [s.name for s in strategies]
    for metric in METRIC_COLUMNS:
        cell = {(r["strategy"], r["threshold"]): r[metric] for r in rows}
        with open(out_dir / f"plot_{metric}.csv", "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["threshold", *ordered_names])
            for threshold in sorted(set(thresholds)):
                writer.writerow([threshold, *(cell[(n, threshold)] for n in ordered_names)])

    print(f"{len(rows)} sweep rows -> {out_dir}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sdgtag", description=__doc__)
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--sdg-defs", dest="sdg_defs", help="SDG definitions JSON")
    parser.add_argument("--word-table", dest="word_table", help="word-embedding table file")
    parser.add_argument("--dan-cache", dest="dan_cache", help="DAN sentence-cache file")
    parser.add_argument(
        "--transformer-cache", dest="transformer_cache", help="Transformer sentence-cache file"
    )
    parser.add_argument("--strategy", choices=sorted(STRATEGIES), dest="strategy")
    parser.add_argument("--threshold", type=float, dest="threshold")
    parser.add_argument("--seed", type=int, dest="seed")
    parser.add_argument("--workers", type=int, dest="workers")
    parser.add_argument("--combine-variant", choices=COMBINE_VARIANTS, dest="combine_variant")
    parser.add_argument("--r-variant", choices=R_VARIANTS, dest="r_variant")

    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="build the TF-IDF model and corpus digest manifest")
    p_build.add_argument("--out-model", default="tfidf_model.json")
    p_build.add_argument("--out-manifest", default="corpus_digests.tsv")
    p_build.set_defaults(func=cmd_build)

    p_pre = sub.add_parser("preflight", help="list sentence digests missing from the caches")
    p_pre.add_argument("texts", help="JSONL paragraphs file")
    p_pre.add_argument("--out-manifest", default="missing_digests.tsv")
    p_pre.set_defaults(func=cmd_preflight)

    p_cls = sub.add_parser("classify", help="classify paragraphs from JSONL")
    p_cls.add_argument("input", help="JSONL paragraphs file, or - for stdin")
    p_cls.add_argument("--output", default="-")
    p_cls.add_argument(
        "--akn",
        nargs="?",
        const="",
        default=None,
        metavar="DIR",
        help="also write Akoma Ntoso fragments (default DIR: <output>.akn)",
    )
    p_cls.set_defaults(func=cmd_classify)

    p_eval = sub.add_parser("evaluate", help="score an annotated dataset")
    p_eval.add_argument("dataset", help="JSONL annotated paragraphs")
    p_eval.add_argument("--output", default="-")
    p_eval.set_defaults(func=cmd_evaluate)

    p_sweep = sub.add_parser("sweep", help="threshold sweep across strategies")
    p_sweep.add_argument("dataset", help="JSONL annotated paragraphs")
    p_sweep.add_argument("--thresholds", required=True, help="comma-separated thresholds")
    p_sweep.add_argument("--strategies", default=",".join(sorted(STRATEGIES)))
    p_sweep.add_argument("--out-dir", required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_akn = sub.add_parser("emit-akn", help="classify and write only the AKN fragments")
    p_akn.add_argument("input", help="JSONL paragraphs file")
    p_akn.add_argument("--out-dir", required=True)
    p_akn.set_defaults(func=cmd_emit_akn)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
        return args.func(args, config)
    except UsageError as exc:
        print(f"sdgtag: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CacheMiss as exc:
        print(f"sdgtag: sentence cache incomplete: {exc}", file=sys.stderr)
        for digest in exc.digests:
            print(digest, file=sys.stderr)
        return EXIT_CACHE
    except (CorpusError, EmbeddingFileError, OSError, ValueError) as exc:
        print(f"sdgtag: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
