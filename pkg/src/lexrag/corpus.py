"""Raw judgment ingestion, annotation CSV persistence, and corpus statistics.

The raw corpus is a directory of plain-text files; annotations live in a
single UTF-8 CSV with RFC-4180 quoting. List-valued fields are packed into
one cell with "; " as the internal delimiter; literal semicolons and
backslashes inside elements are backslash-escaped so the round trip is
lossless.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

TEXT_EXTENSIONS = {".txt", ".text"}

CSV_HEADER = [
    "doc_id", "case_name", "date", "appellant", "respondent", "judges",
    "citations", "related_provisions", "case_type", "judgement", "summary",
    "outcome_of_appellant",
]

_LIST_FIELDS = {"judges", "citations", "related_provisions"}


class CorpusError(Exception):
    pass


class AnnotationsFormatError(CorpusError):
    """A CSV row or header that cannot be interpreted; names the row."""


@dataclass(frozen=True)
class JudgmentDocument:
    doc_id: str
    text: str
    source_path: str

    @property
    def is_empty(self) -> bool:
        return not self.text.strip()


@dataclass(frozen=True)
class IngestError:
    source_path: str
    reason: str


@dataclass
class IngestResult:
    documents: list[JudgmentDocument]
    errors: list[IngestError] = field(default_factory=list)


@dataclass
class AnnotationRecord:
    doc_id: str
    case_name: str = ""
    date: str = ""
    appellant: str = ""
    respondent: str = ""
    judges: list[str] = field(default_factory=list)
    citations: list[str] = field(default_factory=list)
    related_provisions: list[str] = field(default_factory=list)
    case_type: str = ""
    judgement: str = ""
    summary: str = ""
    outcome_of_appellant: str = ""


def doc_id_for(path: Path) -> str:
    """File stem, lowercased, path separators replaced; stable and auditable."""
    return path.stem.lower().replace("/", "_").replace("\\", "_")


def ingest_raw(directory: str | Path) -> IngestResult:
    """Load every text file in ``directory`` as one document.

    Documents come back ordered by doc_id. Undecodable files become error
    records instead of aborting the run; an unreadable directory is fatal.
    """
    root = Path(directory)
    if not root.is_dir():
        raise CorpusError(f"not a readable directory: {root}")

    documents: list[JudgmentDocument] = []
    errors: list[IngestError] = []
    seen: dict[str, Path] = {}
    for path in sorted(root.iterdir()):
        if not path.is_file() or path.suffix.lower() not in TEXT_EXTENSIONS:
            continue
        doc_id = doc_id_for(path)
        if doc_id in seen:
            errors.append(IngestError(str(path), f"duplicate doc_id {doc_id!r} (also {seen[doc_id]})"))
            continue
        try:
            text = path.read_text(encoding="utf-8")
        except UnicodeDecodeError as exc:
            errors.append(IngestError(str(path), f"not valid UTF-8: {exc}"))
            continue
        except OSError as exc:
            errors.append(IngestError(str(path), f"unreadable: {exc}"))
            continue
        seen[doc_id] = path
        documents.append(JudgmentDocument(doc_id, text, str(path)))
    documents.sort(key=lambda d: d.doc_id)
    return IngestResult(documents, errors)


def _pack_list(items: list[str]) -> str:
    return "; ".join(item.replace("\\", "\\\\").replace(";", "\\;") for item in items)


def _unpack_list(cell: str) -> list[str]:
    if cell == "":
        return []
    items: list[str] = []
    buf: list[str] = []
    i = 0
    while i < len(cell):
        ch = cell[i]
        if ch == "\\" and i + 1 < len(cell):
            buf.append(cell[i + 1])
            i += 2
        elif ch == ";" and cell[i : i + 2] == "; ":
            items.append("".join(buf))
            buf = []
            i += 2
        else:
            buf.append(ch)
            i += 1
    items.append("".join(buf))
    return items


def save_annotations(records: list[AnnotationRecord], path: str | Path) -> None:
    """Write records to CSV; ``load_annotations`` restores them exactly.

    NUL characters are dropped: the csv module refuses them on both the
    write and the read side, so they cannot survive persistence anyway.
    """
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_HEADER)
        for record in records:
            row = []
            for name in CSV_HEADER:
                value = getattr(record, name)
                if name in _LIST_FIELDS:
                    row.append(_pack_list([v.replace("\x00", "") for v in value]))
                else:
                    row.append(value.replace("\x00", ""))
            writer.writerow(row)


def load_annotations(path: str | Path) -> list[AnnotationRecord]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise AnnotationsFormatError("missing header row") from None
        if header != CSV_HEADER:
            raise AnnotationsFormatError(f"unexpected header: {header}")

        records: list[AnnotationRecord] = []
        seen: set[str] = set()
        for row_number, row in enumerate(reader, start=2):
            if len(row) != len(CSV_HEADER):
                raise AnnotationsFormatError(
                    f"row {row_number}: expected {len(CSV_HEADER)} fields, got {len(row)}"
                )
            values = dict(zip(CSV_HEADER, row))
            if not values["doc_id"]:
                raise AnnotationsFormatError(f"row {row_number}: empty doc_id field")
            if values["doc_id"] in seen:
                raise AnnotationsFormatError(f"row {row_number}: duplicate doc_id {values['doc_id']!r}")
            seen.add(values["doc_id"])
            for name in _LIST_FIELDS:
                values[name] = _unpack_list(values[name])
            records.append(AnnotationRecord(**values))
    return records


def case_type_distribution(records: list[AnnotationRecord]) -> dict[str, int]:
    """Counts per case type, ordered by descending count then label."""
    counts = Counter(record.case_type for record in records)
    return dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))
