"""LLM-driven extraction of the eleven structured fields per judgment.

One generation call per document with a labeled-line reply format; replies
are parsed tolerantly (prose around the labels is ignored) and dates are
normalized to ISO-8601 when a common format is recognized, kept verbatim
otherwise.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from .corpus import AnnotationRecord, JudgmentDocument
from .providers import GenerationRequest, ProviderBundle, ProviderError, generate

logger = logging.getLogger(__name__)

ANNOTATION_PROMPT_TEMPLATE = (
    "Extract the following fields from the Indian court judgment below. "
    "Reply with exactly these labeled lines, one per field, using '; ' to "
    "separate multiple values: CASE_NAME:, DATE:, APPELLANT:, RESPONDENT:, "
    "JUDGES:, CITATIONS:, PROVISIONS:, CASE_TYPE:, JUDGEMENT:, SUMMARY:, "
    "OUTCOME_OF_APPELLANT:\n\n{document}"
)

_LABEL_TO_FIELD = {
    "CASE_NAME": "case_name",
    "DATE": "date",
    "APPELLANT": "appellant",
    "RESPONDENT": "respondent",
    "JUDGES": "judges",
    "CITATIONS": "citations",
    "PROVISIONS": "related_provisions",
    "CASE_TYPE": "case_type",
    "JUDGEMENT": "judgement",
    "SUMMARY": "summary",
    "OUTCOME_OF_APPELLANT": "outcome_of_appellant",
}

_LIST_FIELDS = {"judges", "citations", "related_provisions"}

_DMY_RE = re.compile(
    r"^(\d{1,2})(?:st|nd|rd|th)?[ .-]"
    r"(January|February|March|April|May|June|July|August|September|October|November|December)"
    r"[ .,-]+(\d{4})$",
    re.IGNORECASE,
)
_SLASH_RE = re.compile(r"^(\d{1,2})[/.](\d{1,2})[/.](\d{4})$")
_ISO_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_MONTHS = {
    name: i + 1
    for i, name in enumerate(
        ["january", "february", "march", "april", "may", "june", "july",
         "august", "september", "october", "november", "december"]
    )
}


class AnnotationParseError(Exception):
    pass


@dataclass
class AnnotationRun:
    records: list[AnnotationRecord]
    errors: list[tuple[str, str]] = field(default_factory=list)  # (doc_id, reason)


def normalize_date(raw: str) -> str:
    """ISO-8601 when the value matches a common court-date format, else verbatim."""
    value = raw.strip()
    if _ISO_RE.match(value):
        return value
    match = _DMY_RE.match(value)
    if match:
        day, month, year = match.groups()
        return f"{year}-{_MONTHS[month.lower()]:02d}-{int(day):02d}"
    match = _SLASH_RE.match(value)
    if match:
        day, month, year = match.groups()
        if 1 <= int(month) <= 12 and 1 <= int(day) <= 31:
            return f"{year}-{int(month):02d}-{int(day):02d}"
    return raw


def parse_annotation_reply(doc_id: str, reply: str) -> AnnotationRecord:
    """Build a record from labeled lines; absent labels become empty fields."""
    record = AnnotationRecord(doc_id=doc_id)
    matched = 0
    for raw_line in reply.splitlines():
        line = raw_line.strip()
        label, sep, value = line.partition(":")
        field_name = _LABEL_TO_FIELD.get(label.strip().upper())
        if not sep or field_name is None:
            continue
        matched += 1
        value = value.strip()
        if field_name in _LIST_FIELDS:
            setattr(record, field_name, [v.strip() for v in value.split(";") if v.strip()])
        elif field_name == "date":
            record.date = normalize_date(value)
        else:
            setattr(record, field_name, value)
    if matched == 0:
        raise AnnotationParseError(f"{doc_id}: no labeled fields found in reply")
    return record


def annotate_document(doc: JudgmentDocument, providers: ProviderBundle) -> AnnotationRecord:
    prompt = ANNOTATION_PROMPT_TEMPLATE.format(document=doc.text)
    reply = generate(providers.generation(False), GenerationRequest(prompt=prompt, max_output_tokens=1024))
    return parse_annotation_reply(doc.doc_id, reply)


def annotate_corpus(docs: list[JudgmentDocument], providers: ProviderBundle) -> AnnotationRun:
    """Annotate every non-empty document; per-document failures are recorded
    and the run continues."""
    run = AnnotationRun(records=[])
    for doc in docs:
        if doc.is_empty:
            run.errors.append((doc.doc_id, "document text is empty"))
            continue
        try:
            run.records.append(annotate_document(doc, providers))
        except (ProviderError, AnnotationParseError) as err:
            logger.warning("annotation failed for %s: %s", doc.doc_id, err)
            run.errors.append((doc.doc_id, str(err)))
    return run
