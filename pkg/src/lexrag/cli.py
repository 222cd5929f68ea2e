"""Operator command line: ingest, annotate, summarize, index, query, eval,
serve.

Settings resolve as flags > environment variables > config file > built-in
defaults (environment variables carry credentials only). Exit codes: 0
success, 2 configuration error, 3 provider error, 4 data error. All
commands are deterministic in mock mode so outputs can be golden-tested.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from .ablation import AblationError, render_tables, run_ablation
from .annotate import annotate_corpus
from .chunking import chunk_by_tokens
from .config import AppConfig, ConfigError, load_config
from .corpus import (
    AnnotationsFormatError,
    CorpusError,
    JudgmentDocument,
    case_type_distribution,
    ingest_raw,
    load_annotations,
    save_annotations,
)
from .providers import ProviderError, embed
from .rag import (
    FingerprintMismatchError,
    RagError,
    answer_query,
    overview_to_dict,
)
from .summarize import StageError, summarize_document, variant_from_slug
from .vectorstore import VectorIndex, VectorStoreError, ZeroNormError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PROVIDER = 3
EXIT_DATA = 4

REFS_HEADER = ["doc_id", "reference"]


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _write_json(payload, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_corpus(path: str) -> list[JudgmentDocument]:
    """Accept either a directory of text files or a saved ingest file."""
    source = Path(path)
    if source.is_dir():
        result = ingest_raw(source)
        for error in result.errors:
            _warn(f"skipped {error.source_path}: {error.reason}")
        return result.documents
    data = json.loads(source.read_text(encoding="utf-8"))
    if not isinstance(data, dict) or not isinstance(data.get("documents"), list):
        raise CorpusError(f"{source}: not an ingest file (missing 'documents' list)")
    documents = []
    for entry in data["documents"]:
        doc_id, text = entry.get("doc_id"), entry.get("text")
        if not isinstance(doc_id, str) or not isinstance(text, str):
            raise CorpusError(f"{source}: document entries need string doc_id and text")
        documents.append(JudgmentDocument(doc_id, text, str(entry.get("source", ""))))
    return documents


def _load_annotation_map(path: str) -> dict:
    return {record.doc_id: record for record in load_annotations(path)}


def _load_references(path: str) -> dict[str, str]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != REFS_HEADER:
            raise CorpusError(f"{path}: expected header {','.join(REFS_HEADER)}")
        references: dict[str, str] = {}
        for row_number, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise CorpusError(f"{path}: row {row_number} has {len(row)} fields, expected 2")
            references[row[0]] = row[1]
    return references


def cmd_ingest(args: argparse.Namespace, config: AppConfig) -> int:
    result = ingest_raw(args.directory)
    if not result.documents:
        _warn(f"no documents found in {args.directory}")
    for error in result.errors:
        _warn(f"skipped {error.source_path}: {error.reason}")
    payload = {
        "documents": [
            {"doc_id": doc.doc_id, "source": Path(doc.source_path).name, "text": doc.text}
            for doc in result.documents
        ],
        "errors": [
            {"source": Path(error.source_path).name, "reason": error.reason}
            for error in result.errors
        ],
    }
    _write_json(payload, args.out)
    return EXIT_OK


def cmd_annotate(args: argparse.Namespace, config: AppConfig) -> int:
    documents = _load_corpus(args.corpus)
    bundle = config.provider_bundle()
    run = annotate_corpus(documents, bundle)
    for doc_id, reason in run.errors:
        _warn(f"annotation failed for {doc_id}: {reason}")
    save_annotations(run.records, args.out)
    print(f"annotated {len(run.records)} of {len(documents)} documents -> {args.out}")
    if documents and not run.records:
        return EXIT_PROVIDER
    return EXIT_OK


def cmd_summarize(args: argparse.Namespace, config: AppConfig) -> int:
    documents = _load_corpus(args.corpus)
    variant = variant_from_slug(args.variant)
    bundle = config.provider_bundle()
    summaries, errors = [], []
    for doc in documents:
        try:
            summary = summarize_document(doc, variant, bundle, config.chunk_params)
            summaries.append({"doc_id": summary.doc_id, "text": summary.text})
        except (StageError, ProviderError) as err:
            _warn(f"summarization failed for {doc.doc_id}: {err}")
            errors.append({"doc_id": doc.doc_id, "reason": str(err)})
    payload = {
        "variant": variant.slug,
        "params": {
            "max_words": config.chunk_params.max_words,
            "overlap_sentences": config.chunk_params.overlap_sentences,
        },
        "summaries": summaries,
        "errors": errors,
    }
    _write_json(payload, args.out)
    if documents and not summaries:
        return EXIT_PROVIDER
    return EXIT_OK


def cmd_index(args: argparse.Namespace, config: AppConfig) -> int:
    bundle = config.provider_bundle()
    params = config.chunk_params
    annotations = (
        _load_annotation_map(config.annotations_path) if config.annotations_path else {}
    )

    if args.raw:
        items = [(doc.doc_id, doc.text) for doc in _load_corpus(args.summaries)]
    else:
        data = json.loads(Path(args.summaries).read_text(encoding="utf-8"))
        if not isinstance(data, dict) or not isinstance(data.get("summaries"), list):
            raise CorpusError(f"{args.summaries}: not a summaries file")
        items = [(entry["doc_id"], entry["text"]) for entry in data["summaries"]]

    index = VectorIndex(fingerprint=bundle.embedding.fingerprint())
    inserted = 0
    for doc_id, text in items:
        chunks = chunk_by_tokens(text, params.max_tokens, params.overlap_tokens, doc_id)
        if not chunks:
            _warn(f"{doc_id}: no tokens to index")
            continue
        vectors = embed(bundle.embedding, [chunk.text for chunk in chunks], bundle.retry)
        record = annotations.get(doc_id)
        metadata = (
            {"case_name": record.case_name, "date": record.date, "case_type": record.case_type}
            if record
            else {}
        )
        for chunk, vector in zip(chunks, vectors):
            try:
                index.insert(chunk, vector, dict(metadata))
                inserted += 1
            except ZeroNormError:
                _warn(f"{chunk.chunk_id}: zero-norm embedding, skipped")
    index.persist(config.index_path)
    print(f"indexed {inserted} chunks from {len(items)} documents -> {config.index_path}")
    return EXIT_OK


def cmd_query(args: argparse.Namespace, config: AppConfig) -> int:
    bundle = config.provider_bundle()
    index = VectorIndex.load(config.index_path)
    annotations = (
        _load_annotation_map(config.annotations_path) if config.annotations_path else {}
    )
    overview = answer_query(args.query_text, index, bundle, config.rag, annotations)
    _write_json(overview_to_dict(overview), args.out)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, config: AppConfig) -> int:
    documents = _load_corpus(args.corpus)
    references = _load_references(args.refs)
    bundle = config.provider_bundle()
    report = run_ablation(
        documents, references, providers=bundle, params=config.chunk_params
    )
    sys.stdout.write(render_tables(report))
    if args.out:
        _write_json({"rows": report.to_rows()}, args.out)
    return EXIT_OK


def cmd_stats(args: argparse.Namespace, config: AppConfig) -> int:
    if not config.annotations_path:
        raise ConfigError("stats needs --annotations or annotations_path in the config")
    records = load_annotations(config.annotations_path)
    _write_json(case_type_distribution(records), args.out)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace, config: AppConfig) -> int:
    import uvicorn

    from .service import create_app

    static_dir = Path("frontend") / "dist"
    app = create_app(config, static_dir=static_dir if static_dir.is_dir() else None)
    uvicorn.run(app, host=config.host, port=config.port)
    return EXIT_OK


def _effective_config(args: argparse.Namespace) -> AppConfig:
    """Resolve flags over config-file values over defaults."""
    config = load_config(args.config) if args.config else AppConfig()
    if getattr(args, "mock", False):
        config.mock = True
        config.generation_base = None
        config.generation_fine_tuned = None
        config.embedding = None

    chunk_overrides = {
        name: getattr(args, name)
        for name in ("max_words", "overlap_sentences", "max_tokens", "overlap_tokens")
        if getattr(args, name, None) is not None
    }
    if chunk_overrides:
        config.chunk_params = replace(config.chunk_params, **chunk_overrides)
    if getattr(args, "k", None) is not None:
        config.rag = replace(config.rag, k=args.k)
    if getattr(args, "index", None) is not None:
        config.index_path = args.index
    if getattr(args, "annotations", None) is not None:
        config.annotations_path = args.annotations
    config.validate()
    return config


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to JSON config file (default: none)")
    common.add_argument(
        "--mock",
        action="store_true",
        help="use deterministic offline providers (default: on unless a config file configures endpoints)",
    )

    parser = argparse.ArgumentParser(
        prog="lexrag",
        description="Judgment summarization and retrieval pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser(
        "ingest", parents=[common], help="load a directory of judgment text files"
    )
    p_ingest.add_argument("directory", help="directory holding .txt judgment files")
    p_ingest.add_argument("--out", help="output path for the corpus file (default: stdout)")
    p_ingest.set_defaults(func=cmd_ingest)

    p_annotate = sub.add_parser(
        "annotate", parents=[common], help="extract structured fields per judgment"
    )
    p_annotate.add_argument("corpus", help="corpus directory or ingest output file")
    p_annotate.add_argument("--out", required=True, help="output CSV path (required)")
    p_annotate.set_defaults(func=cmd_annotate)

    p_summarize = sub.add_parser(
        "summarize", parents=[common], help="summarize every document under one variant"
    )
    p_summarize.add_argument("corpus", help="corpus directory or ingest output file")
    p_summarize.add_argument(
        "--variant",
        default="abs-ext-ft",
        help="one of: extractive, abstractive, abstractive-ft, ext-abs, ext-abs-ft, "
        "abs-ext, abs-ext-ft (default: abs-ext-ft)",
    )
    p_summarize.add_argument(
        "--max-words", type=int, help="maximum words per summarization chunk (default: 200)"
    )
    p_summarize.add_argument(
        "--overlap-sentences",
        type=int,
        help="sentences repeated between consecutive summarization chunks (default: 2)",
    )
    p_summarize.add_argument("--out", help="output path for summaries (default: stdout)")
    p_summarize.set_defaults(func=cmd_summarize)

    p_index = sub.add_parser(
        "index", parents=[common], help="embed summaries into a searchable vector index"
    )
    p_index.add_argument("summaries", help="summaries file, or corpus when --raw is given")
    p_index.add_argument("--index", help="vector index file path (default: index.lxvi)")
    p_index.add_argument(
        "--max-tokens", type=int, help="maximum tokens per index chunk (default: 1024)"
    )
    p_index.add_argument(
        "--overlap-tokens",
        type=int,
        help="tokens repeated between consecutive index chunks (default: 100)",
    )
    p_index.add_argument(
        "--annotations", help="annotations CSV used for chunk metadata (default: none)"
    )
    p_index.add_argument(
        "--raw",
        action="store_true",
        help="index full judgment text instead of summaries (default: off)",
    )
    p_index.set_defaults(func=cmd_index)

    p_query = sub.add_parser(
        "query", parents=[common], help="answer a question from the indexed corpus"
    )
    p_query.add_argument("query_text", help="the question to answer")
    p_query.add_argument("--index", help="vector index file path (default: index.lxvi)")
    p_query.add_argument("--k", type=int, help="retrieved contexts per query (default: 3)")
    p_query.add_argument(
        "--annotations", help="annotations CSV for context headers (default: none)"
    )
    p_query.add_argument("--out", help="output path for the answer (default: stdout)")
    p_query.set_defaults(func=cmd_query)

    p_eval = sub.add_parser(
        "eval", parents=[common], help="run the summarization ablation and report scores"
    )
    p_eval.add_argument("corpus", help="corpus directory or ingest output file")
    p_eval.add_argument("refs", help="CSV of doc_id,reference summary pairs")
    p_eval.add_argument(
        "--max-words", type=int, help="maximum words per summarization chunk (default: 200)"
    )
    p_eval.add_argument(
        "--overlap-sentences",
        type=int,
        help="sentences repeated between consecutive summarization chunks (default: 2)",
    )
    p_eval.add_argument("--out", help="output path for machine-readable rows (default: none)")
    p_eval.set_defaults(func=cmd_eval)

    p_stats = sub.add_parser(
        "stats", parents=[common], help="case-type distribution of an annotated corpus"
    )
    p_stats.add_argument("--annotations", help="annotations CSV path (default: from config)")
    p_stats.add_argument("--out", help="output path (default: stdout)")
    p_stats.set_defaults(func=cmd_stats)

    p_serve = sub.add_parser(
        "serve", parents=[common], help="serve the HTTP API over the indexed corpus"
    )
    p_serve.add_argument("--index", help="vector index file path (default: index.lxvi)")
    p_serve.add_argument(
        "--annotations", help="annotations CSV path (default: from config)"
    )
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _effective_config(args)
        return args.func(args, config)
    except (ConfigError, FingerprintMismatchError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except ProviderError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PROVIDER
    except (
        CorpusError,
        AnnotationsFormatError,
        VectorStoreError,
        RagError,
        AblationError,
        json.JSONDecodeError,
        OSError,
    ) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
