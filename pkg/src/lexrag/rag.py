"""Query-time retrieval loop: embed, search, assemble, generate, parse.

Retrieval evidence is always returned, even when generation fails; a
degraded overview (hits without an answer) is still useful legal research
output and keeps the pipeline robust to provider outages.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .chunking import count_tokens, truncate_to_tokens
from .corpus import AnnotationRecord
from .providers import GenerationRequest, ProviderBundle, ProviderError, embed, generate
from .vectorstore import MetadataFilter, SearchHit, VectorIndex

# Version 1 of the instruction footer appended to every query prompt.
INSTRUCTION_FOOTER = (
    "Using only the context above, list each relevant case as: "
    "CASE:/DATE:/OUTCOME:/CITATIONS:/PROVISIONS:/SUMMARY:. "
    "Then answer the question."
)

_OVERVIEW_LABELS = ("CASE", "DATE", "OUTCOME", "CITATIONS", "PROVISIONS", "SUMMARY")


class RagError(Exception):
    pass


class EmptyIndexError(RagError):
    pass


class ContextBudgetError(RagError):
    """Every context block was truncated away by the token budget."""


class FingerprintMismatchError(RagError):
    """Index was built with a different embedder than the one configured."""


@dataclass
class RagConfig:
    k: int = 3
    max_context_tokens: int = 3072
    prompt_template_version: str = "1"
    answer_language: str = "en"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.max_context_tokens < 256:
            raise ValueError(f"max_context_tokens must be >= 256, got {self.max_context_tokens}")


@dataclass
class CitedCase:
    doc_id: str
    case_name: str = ""
    date: str = ""
    outcome: str = ""
    citations: list[str] = field(default_factory=list)
    provisions: list[str] = field(default_factory=list)
    judgment_summary: str = ""


@dataclass
class CaseOverview:
    query: str
    answer_text: str
    cited_cases: list[CitedCase]
    retrieved: list[SearchHit]
    degraded: bool = False  # generation failed; evidence only
    parse_miss: bool = False  # generation succeeded but no parseable case block


def _context_block(position: int, hit: SearchHit, annotation: AnnotationRecord | None) -> str:
    if annotation is not None:
        header = (
            f"[{position}] Case: {annotation.case_name} | Date: {annotation.date} "
            f"| Type: {annotation.case_type}"
        )
    else:
        header = f"[{position}]"
    return f"{header}\n{hit.chunk.text}"


def assemble_prompt(
    query: str,
    hits: list[SearchHit],
    annotations: dict[str, AnnotationRecord],
    config: RagConfig,
) -> str:
    """Deterministic prompt: numbered context blocks in hit order, then the
    query and the instruction footer.

    Blocks are trimmed from the tail (lowest-ranked first) until the context
    fits ``max_context_tokens``; the query itself is never truncated.
    """
    if not hits:
        raise ValueError("hits must be non-empty")

    blocks = [
        _context_block(i + 1, hit, annotations.get(hit.chunk.doc_id))
        for i, hit in enumerate(hits)
    ]

    kept: list[str] = []
    remaining = config.max_context_tokens
    for block in blocks:
        tokens = count_tokens(block)
        if tokens <= remaining:
            kept.append(block)
            remaining -= tokens
        else:
            truncated = truncate_to_tokens(block, remaining)
            if truncated:
                kept.append(truncated)
                remaining = 0
            break
    if not kept:
        raise ContextBudgetError(
            f"context budget of {config.max_context_tokens} tokens fits no block"
        )

    context = "\n\n".join(kept)
    return f"Context:\n\n{context}\n\nQuestion: {query}\n\n{INSTRUCTION_FOOTER}"


def parse_overview(generated_text: str) -> list[CitedCase]:
    """Parse labeled-line case blocks out of generated text.

    A ``CASE:`` line opens a block; the other labels fill it. Prose before,
    between, or after blocks is ignored. Returns [] when nothing parses.
    """
    cases: list[CitedCase] = []
    current: CitedCase | None = None
    for raw_line in generated_text.splitlines():
        line = raw_line.strip()
        label, sep, value = line.partition(":")
        label = label.strip().upper()
        if not sep or label not in _OVERVIEW_LABELS:
            continue
        value = value.strip()
        if label == "CASE":
            current = CitedCase(doc_id="", case_name=value)
            cases.append(current)
            continue
        if current is None:
            continue
        if label == "DATE":
            current.date = value
        elif label == "OUTCOME":
            current.outcome = value
        elif label == "CITATIONS":
            current.citations = [v.strip() for v in value.split(";") if v.strip()]
        elif label == "PROVISIONS":
            current.provisions = [v.strip() for v in value.split(";") if v.strip()]
        elif label == "SUMMARY":
            current.judgment_summary = value
    return cases


def _trace_cited_cases(
    parsed: list[CitedCase],
    hits: list[SearchHit],
    annotations: dict[str, AnnotationRecord],
) -> list[CitedCase]:
    """Attach doc_ids by case-name match against the retrieved docs; entries
    that trace to no hit are dropped so evidence closure always holds."""
    by_name: dict[str, str] = {}
    for hit in hits:
        doc_id = hit.chunk.doc_id
        annotation = annotations.get(doc_id)
        if annotation is not None and annotation.case_name:
            by_name.setdefault(annotation.case_name.strip().lower(), doc_id)
    traced = []
    for case in parsed:
        doc_id = by_name.get(case.case_name.strip().lower())
        if doc_id is not None:
            case.doc_id = doc_id
            traced.append(case)
    return traced


def hit_to_dict(hit: SearchHit) -> dict:
    return {
        "vector_id": hit.vector_id,
        "score": float(hit.score),
        "doc_id": hit.chunk.doc_id,
        "chunk_id": hit.chunk.chunk_id,
        "text": hit.chunk.text,
        "metadata": dict(sorted(hit.metadata.items())),
    }


def overview_to_dict(overview: CaseOverview) -> dict:
    """Stable wire form shared by the command line and the HTTP API."""
    return {
        "query": overview.query,
        "answer_text": overview.answer_text,
        "degraded": overview.degraded,
        "parse_miss": overview.parse_miss,
        "cited_cases": [
            {
                "doc_id": case.doc_id,
                "case_name": case.case_name,
                "date": case.date,
                "outcome": case.outcome,
                "citations": list(case.citations),
                "provisions": list(case.provisions),
                "judgment_summary": case.judgment_summary,
            }
            for case in overview.cited_cases
        ],
        "retrieved": [hit_to_dict(hit) for hit in overview.retrieved],
    }


def answer_query(
    query: str,
    index: VectorIndex,
    providers: ProviderBundle,
    config: RagConfig | None = None,
    annotations: dict[str, AnnotationRecord] | None = None,
    timings: dict[str, float] | None = None,
    metadata_filter: MetadataFilter = None,
) -> CaseOverview:
    """Embed the query, retrieve top-k, generate, and parse an overview.

    The embedding provider must match the one the index was built with
    (checked via the recorded fingerprint). Generation failure yields a
    degraded overview carrying the retrieval evidence.
    """
    config = config or RagConfig()
    annotations = annotations or {}
    if not query.strip():
        raise ValueError("query must be non-empty")
    if len(index) == 0:
        raise EmptyIndexError("index holds no vectors")
    if index.fingerprint and index.fingerprint != providers.embedding.fingerprint():
        raise FingerprintMismatchError(
            f"index built with {index.fingerprint!r}, "
            f"configured embedder is {providers.embedding.fingerprint()!r}"
        )

    started = time.perf_counter()
    query_vector = embed(providers.embedding, [query], providers.retry)[0]
    embedded_at = time.perf_counter()
    hits = index.top_k(query_vector, config.k, metadata_filter)
    searched_at = time.perf_counter()

    degraded = False
    parse_miss = False
    answer_text = ""
    cited: list[CitedCase] = []
    if hits:
        try:
            prompt = assemble_prompt(query, hits, annotations, config)
            request = GenerationRequest(prompt=prompt, max_output_tokens=1024)
            answer_text = generate(providers.generation(False), request, providers.retry)
            parsed = parse_overview(answer_text)
            cited = _trace_cited_cases(parsed, hits, annotations)
            parse_miss = not parsed
        except (ProviderError, ContextBudgetError):
            degraded = True
    else:
        degraded = True  # a filter can exclude every stored vector
    generated_at = time.perf_counter()

    if timings is not None:
        timings["embed_ms"] = (embedded_at - started) * 1000.0
        timings["search_ms"] = (searched_at - embedded_at) * 1000.0
        timings["generate_ms"] = (generated_at - searched_at) * 1000.0

    return CaseOverview(query, answer_text, cited, hits, degraded, parse_miss)
