import csv
from pathlib import Path

import pytest

from lexrag.annotate import annotate_corpus
from lexrag.chunking import chunk_by_tokens
from lexrag.corpus import ingest_raw
from lexrag.providers import embed, mock_bundle
from lexrag.vectorstore import VectorIndex

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_corpus_dir() -> Path:
    return FIXTURES / "corpus"


@pytest.fixture(scope="session")
def references_path() -> Path:
    return FIXTURES / "references.csv"


@pytest.fixture(scope="session")
def fixture_docs(fixture_corpus_dir):
    result = ingest_raw(fixture_corpus_dir)
    assert not result.errors
    return result.documents


@pytest.fixture(scope="session")
def fixture_references(references_path):
    with open(references_path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        return {row["doc_id"]: row["reference"] for row in reader}


@pytest.fixture(scope="session")
def fixture_annotations(fixture_docs):
    """doc_id -> AnnotationRecord, produced by the offline provider."""
    run = annotate_corpus(fixture_docs, mock_bundle())
    assert not run.errors
    return {record.doc_id: record for record in run.records}


@pytest.fixture(scope="session")
def fixture_index(fixture_docs, fixture_annotations):
    """Raw-text index over the fixture corpus; read-only in tests."""
    bundle = mock_bundle()
    index = VectorIndex(fingerprint=bundle.embedding.fingerprint())
    for doc in fixture_docs:
        chunks = chunk_by_tokens(doc.text, 1024, 100, doc.doc_id)
        vectors = embed(bundle.embedding, [c.text for c in chunks])
        record = fixture_annotations[doc.doc_id]
        metadata = {
            "case_name": record.case_name,
            "date": record.date,
            "case_type": record.case_type,
        }
        for chunk, vector in zip(chunks, vectors):
            index.insert(chunk, vector, dict(metadata))
    return index


@pytest.fixture()
def bundle():
    return mock_bundle()
