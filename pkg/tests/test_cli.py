"""Command line behavior: pipeline wiring, output formats, exit codes."""

from __future__ import annotations

import json

import pytest

from lexrag.cli import EXIT_CONFIG, EXIT_DATA, EXIT_OK, EXIT_PROVIDER, main
from lexrag.config import AppConfig
from lexrag.providers import (
    FailingGenerationProvider,
    MockHashEmbeddingProvider,
    ProviderBundle,
    ProviderTransportError,
    RetryPolicy,
    mock_bundle,
)


@pytest.fixture(scope="module")
def workdir(tmp_path_factory, fixture_corpus_dir):
    """Artifacts of one full mock pipeline run, shared across this module."""
    root = tmp_path_factory.mktemp("cli")
    paths = {
        "corpus": root / "corpus.json",
        "annotations": root / "annotations.csv",
        "summaries": root / "summaries.json",
        "index": root / "index.lxvi",
        "answer": root / "answer.json",
        "root": root,
    }
    assert main(["ingest", str(fixture_corpus_dir), "--out", str(paths["corpus"])]) == EXIT_OK
    assert main(["annotate", str(paths["corpus"]), "--out", str(paths["annotations"])]) == EXIT_OK
    assert main([
        "summarize", str(paths["corpus"]),
        "--variant", "abs-ext-ft",
        "--out", str(paths["summaries"]),
    ]) == EXIT_OK
    assert main([
        "index", str(paths["summaries"]),
        "--index", str(paths["index"]),
        "--annotations", str(paths["annotations"]),
    ]) == EXIT_OK
    assert main([
        "query", "What relief was granted for acquired land?",
        "--index", str(paths["index"]),
        "--annotations", str(paths["annotations"]),
        "--out", str(paths["answer"]),
    ]) == EXIT_OK
    return paths


def failing_generation_bundle(self=None):
    base = mock_bundle()
    return ProviderBundle(
        generation_base=FailingGenerationProvider(),
        generation_fine_tuned=FailingGenerationProvider(),
        embedding=base.embedding,
        retry=RetryPolicy(attempts=1, base_delay=0.0),
    )


class FailingEmbedding(MockHashEmbeddingProvider):
    def embed_once(self, texts):
        raise ProviderTransportError("embedding endpoint unreachable")


def failing_embedding_bundle(self=None):
    base = mock_bundle()
    return ProviderBundle(
        generation_base=base.generation_base,
        generation_fine_tuned=base.generation_fine_tuned,
        embedding=FailingEmbedding(64),
        retry=RetryPolicy(attempts=1, base_delay=0.0),
    )


# ---------------------------------------------------------------------------
# Pipeline outputs
# ---------------------------------------------------------------------------


def test_ingest_output_shape(workdir, fixture_docs):
    data = json.loads(workdir["corpus"].read_text(encoding="utf-8"))
    assert set(data) == {"documents", "errors"}
    assert data["errors"] == []
    assert [d["doc_id"] for d in data["documents"]] == [d.doc_id for d in fixture_docs]
    for entry in data["documents"]:
        assert set(entry) == {"doc_id", "source", "text"}
        assert entry["source"].endswith(".txt")
        assert "/" not in entry["source"]
        assert entry["text"]


def test_ingest_writes_canonical_json_to_stdout(fixture_corpus_dir, capsys):
    assert main(["ingest", str(fixture_corpus_dir)]) == EXIT_OK
    out = capsys.readouterr().out
    payload = json.loads(out)
    assert out == json.dumps(payload, sort_keys=True, indent=2) + "\n"


def test_annotate_reports_coverage(workdir):
    text = workdir["annotations"].read_text(encoding="utf-8")
    assert text.splitlines()[0].startswith("doc_id,")
    assert len(text.splitlines()) == 6  # header + five records


def test_summarize_output_shape(workdir):
    data = json.loads(workdir["summaries"].read_text(encoding="utf-8"))
    assert data["variant"] == "abs-ext-ft"
    assert data["params"] == {"max_words": 200, "overlap_sentences": 2}
    assert data["errors"] == []
    assert len(data["summaries"]) == 5
    for entry in data["summaries"]:
        assert entry["text"]


def test_summarize_is_byte_reproducible(workdir, fixture_corpus_dir):
    again = workdir["root"] / "summaries-again.json"
    assert main([
        "summarize", str(workdir["corpus"]), "--variant", "abs-ext-ft", "--out", str(again),
    ]) == EXIT_OK
    assert again.read_bytes() == workdir["summaries"].read_bytes()


def test_summarize_accepts_corpus_directory(fixture_corpus_dir, tmp_path):
    out = tmp_path / "summaries.json"
    assert main([
        "summarize", str(fixture_corpus_dir), "--variant", "extractive", "--out", str(out),
    ]) == EXIT_OK
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["variant"] == "extractive"
    assert len(data["summaries"]) == 5


def test_chunking_flags_override_defaults(workdir, tmp_path):
    out = tmp_path / "small.json"
    assert main([
        "summarize", str(workdir["corpus"]),
        "--variant", "extractive",
        "--max-words", "120",
        "--overlap-sentences", "1",
        "--out", str(out),
    ]) == EXIT_OK
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["params"] == {"max_words": 120, "overlap_sentences": 1}


def test_index_reports_chunk_count(workdir, capsys):
    assert workdir["index"].exists()
    again = workdir["root"] / "index-again.lxvi"
    assert main([
        "index", str(workdir["summaries"]),
        "--index", str(again),
        "--annotations", str(workdir["annotations"]),
    ]) == EXIT_OK
    out = capsys.readouterr().out
    assert "from 5 documents" in out
    assert again.read_bytes() == workdir["index"].read_bytes()


def test_index_raw_mode_indexes_full_text(workdir, tmp_path):
    raw_index = tmp_path / "raw.lxvi"
    assert main([
        "index", str(workdir["corpus"]), "--raw", "--index", str(raw_index),
    ]) == EXIT_OK
    assert raw_index.stat().st_size > workdir["index"].stat().st_size


def test_query_output_shape(workdir):
    data = json.loads(workdir["answer"].read_text(encoding="utf-8"))
    assert set(data) == {
        "query", "answer_text", "degraded", "parse_miss", "cited_cases", "retrieved",
    }
    assert data["degraded"] is False
    assert data["parse_miss"] is False
    assert len(data["retrieved"]) == 3
    assert data["cited_cases"]
    retrieved_ids = {hit["doc_id"] for hit in data["retrieved"]}
    assert {case["doc_id"] for case in data["cited_cases"]} <= retrieved_ids


def test_query_is_byte_reproducible(workdir):
    again = workdir["root"] / "answer-again.json"
    assert main([
        "query", "What relief was granted for acquired land?",
        "--index", str(workdir["index"]),
        "--annotations", str(workdir["annotations"]),
        "--out", str(again),
    ]) == EXIT_OK
    assert again.read_bytes() == workdir["answer"].read_bytes()


def test_query_k_flag(workdir, capsys):
    assert main([
        "query", "income tax deduction",
        "--index", str(workdir["index"]),
        "--k", "1",
    ]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert len(data["retrieved"]) == 1


def test_eval_renders_tables_and_rows(workdir, fixture_corpus_dir, tmp_path, capsys):
    refs = str((fixture_corpus_dir.parent / "references.csv"))
    rows_path = tmp_path / "rows.json"
    assert main([
        "eval", str(workdir["corpus"]), refs, "--out", str(rows_path),
    ]) == EXIT_OK
    out = capsys.readouterr().out
    for title in ("Recall", "Precision", "F1"):
        assert title in out
    assert "Summarization Technique" in out
    assert "*" in out
    assert "Corpus: 5 documents" in out

    rows = json.loads(rows_path.read_text(encoding="utf-8"))["rows"]
    assert len(rows) == 63


def test_stats_prints_distribution(workdir, capsys):
    assert main(["stats", "--annotations", str(workdir["annotations"])]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data == {"Probate": 2, "Civil": 1, "Constitutional": 1, "Criminal": 1}


# ---------------------------------------------------------------------------
# Configuration precedence
# ---------------------------------------------------------------------------


def test_flags_override_config_file(workdir, tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text(
        json.dumps({"chunking": {"max_words": 150, "overlap_sentences": 1}}),
        encoding="utf-8",
    )
    out = tmp_path / "summaries.json"
    assert main([
        "summarize", str(workdir["corpus"]),
        "--config", str(config_path),
        "--variant", "extractive",
        "--max-words", "120",
        "--out", str(out),
    ]) == EXIT_OK
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["params"] == {"max_words": 120, "overlap_sentences": 1}


def test_mock_flag_forces_offline_providers(workdir, tmp_path):
    config_path = tmp_path / "live.json"
    config_path.write_text(
        json.dumps({
            "mock": False,
            "providers": {
                "generation_base": {"url": "http://gen.invalid"},
                "generation_fine_tuned": {"url": "http://gen.invalid"},
                "embedding": {"url": "http://embed.invalid", "dim": 64},
            },
        }),
        encoding="utf-8",
    )
    out = tmp_path / "summaries.json"
    assert main([
        "summarize", str(workdir["corpus"]),
        "--config", str(config_path),
        "--mock",
        "--variant", "extractive",
        "--out", str(out),
    ]) == EXIT_OK
    assert json.loads(out.read_text(encoding="utf-8"))["summaries"]


# ---------------------------------------------------------------------------
# Help text pins the documented defaults
# ---------------------------------------------------------------------------


def help_text(command: str, capsys) -> str:
    with pytest.raises(SystemExit) as exc_info:
        main([command, "--help"])
    assert exc_info.value.code == 0
    # argparse wraps long help strings (even inside hyphenated words), so
    # compare with all whitespace removed
    return "".join(capsys.readouterr().out.split())


def test_summarize_help_defaults(capsys):
    text = help_text("summarize", capsys)
    assert "(default:200)" in text
    assert "(default:2)" in text
    assert "(default:abs-ext-ft)" in text


def test_index_help_defaults(capsys):
    text = help_text("index", capsys)
    assert "(default:1024)" in text
    assert "(default:100)" in text
    assert "(default:index.lxvi)" in text


def test_query_help_defaults(capsys):
    text = help_text("query", capsys)
    assert "(default:3)" in text


# ---------------------------------------------------------------------------
# Exit codes
# ---------------------------------------------------------------------------


def test_unknown_variant_is_config_error(workdir, capsys):
    code = main(["summarize", str(workdir["corpus"]), "--variant", "bogus"])
    assert code == EXIT_CONFIG
    assert "error:" in capsys.readouterr().err


def test_blank_query_is_config_error(workdir, capsys):
    code = main(["query", "   ", "--index", str(workdir["index"])])
    assert code == EXIT_CONFIG
    assert "query" in capsys.readouterr().err


def test_missing_index_is_data_error(tmp_path, capsys):
    code = main(["query", "anything", "--index", str(tmp_path / "missing.lxvi")])
    assert code == EXIT_DATA
    assert "error:" in capsys.readouterr().err


def test_malformed_corpus_file_is_data_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"rows": []}), encoding="utf-8")
    assert main(["summarize", str(bad)]) == EXIT_DATA
    assert "documents" in capsys.readouterr().err


def test_bad_refs_header_is_data_error(workdir, tmp_path, capsys):
    refs = tmp_path / "refs.csv"
    refs.write_text("id,summary\na,b\n", encoding="utf-8")
    assert main(["eval", str(workdir["corpus"]), str(refs)]) == EXIT_DATA
    assert "expected header doc_id,reference" in capsys.readouterr().err


def test_invalid_config_file_is_config_error(workdir, tmp_path, capsys):
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"retriever": {}}), encoding="utf-8")
    code = main(["summarize", str(workdir["corpus"]), "--config", str(config_path)])
    assert code == EXIT_CONFIG
    assert "unknown config keys" in capsys.readouterr().err


def test_stats_without_annotations_is_config_error(capsys):
    assert main(["stats"]) == EXIT_CONFIG
    assert "annotations" in capsys.readouterr().err


def test_annotation_provider_outage_is_provider_error(workdir, monkeypatch, tmp_path, capsys):
    monkeypatch.setattr(AppConfig, "provider_bundle", failing_generation_bundle)
    code = main(["annotate", str(workdir["corpus"]), "--out", str(tmp_path / "a.csv")])
    assert code == EXIT_PROVIDER


def test_query_embedding_outage_is_provider_error(workdir, monkeypatch, capsys):
    monkeypatch.setattr(AppConfig, "provider_bundle", failing_embedding_bundle)
    code = main(["query", "anything", "--index", str(workdir["index"])])
    assert code == EXIT_PROVIDER


def test_fingerprint_mismatch_is_config_error(workdir, tmp_path, capsys):
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"mock_dim": 32}), encoding="utf-8")
    code = main([
        "query", "anything", "--config", str(config_path), "--index", str(workdir["index"]),
    ])
    assert code == EXIT_CONFIG
    assert "built with" in capsys.readouterr().err


def test_missing_subcommand_exits_with_usage_error(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main([])
    assert exc_info.value.code == 2
