"""Two-step judgment summarization and its ablation variants.

Abstractive: split the document into word-bounded chunks, summarize each
with one generation call, join in chunk order. Extractive: rank sentences
by embedding centrality (mean cosine to the other sentences) and keep the
top scorers in original order. The four orders x fine-tuned/base generation
give the seven evaluated variants.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

from .chunking import ChunkParams, chunk_by_words, split_sentences
from .corpus import JudgmentDocument
from .providers import (
    GenerationRequest,
    ProviderBundle,
    ProviderError,
    embed,
    generate,
)
from .vectorstore import cosine_similarity

# Version 1 of the per-chunk summarization prompt. Its hash is recorded in
# every stage trace so golden outputs can be tied to the exact wording.
CHUNK_PROMPT_TEMPLATE = (
    "Summarize the following excerpt of an Indian court judgment in 3 sentences, "
    "preserving parties, provisions, and outcome:\n\n{chunk}"
)
CHUNK_PROMPT_VERSION = "1"


def prompt_template_hash() -> str:
    return hashlib.sha256(CHUNK_PROMPT_TEMPLATE.encode("utf-8")).hexdigest()[:16]


class SummaryOrder(Enum):
    EXTRACTIVE_ONLY = "extractive"
    ABSTRACTIVE_ONLY = "abstractive"
    EXT_THEN_ABS = "ext-abs"
    ABS_THEN_EXT = "abs-ext"


@dataclass(frozen=True)
class SummarizationVariant:
    order: SummaryOrder
    fine_tuned: bool = False

    @property
    def label(self) -> str:
        if self.order is SummaryOrder.EXTRACTIVE_ONLY:
            return "Extractive Summarization"
        names = {
            SummaryOrder.ABSTRACTIVE_ONLY: "Abstractive Summarization",
            SummaryOrder.EXT_THEN_ABS: "Ext-Abs Summarization",
            SummaryOrder.ABS_THEN_EXT: "Abs-Ext Summarization",
        }
        suffix = "with FT" if self.fine_tuned else "without FT"
        return f"{names[self.order]} ({suffix})"

    @property
    def slug(self) -> str:
        base = self.order.value
        if self.order is SummaryOrder.EXTRACTIVE_ONLY:
            return base
        return f"{base}-ft" if self.fine_tuned else base


def ablation_variants() -> list[SummarizationVariant]:
    """The seven evaluated combinations, in reporting order."""
    variants = [SummarizationVariant(SummaryOrder.EXTRACTIVE_ONLY)]
    for order in (SummaryOrder.ABSTRACTIVE_ONLY, SummaryOrder.EXT_THEN_ABS, SummaryOrder.ABS_THEN_EXT):
        variants.append(SummarizationVariant(order, fine_tuned=False))
        variants.append(SummarizationVariant(order, fine_tuned=True))
    return variants


def variant_from_slug(slug: str) -> SummarizationVariant:
    for variant in ablation_variants():
        if variant.slug == slug:
            return variant
    known = ", ".join(v.slug for v in ablation_variants())
    raise ValueError(f"unknown variant {slug!r}; expected one of: {known}")


@dataclass(frozen=True)
class StageTrace:
    stage: str
    input_chars: int
    output_chars: int
    calls: int = 0
    template_hash: str | None = None


@dataclass
class Summary:
    doc_id: str
    variant: SummarizationVariant
    text: str
    stage_trace: list[StageTrace] = field(default_factory=list)


class StageError(Exception):
    """A pipeline stage failed; carries the stage name and offending unit."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


def default_extract_budget(text: str) -> int:
    """ceil(0.3 x sentence count), at least 1."""
    return max(1, math.ceil(0.3 * len(split_sentences(text))))


def abstractive_stage(
    doc_text: str,
    providers: ProviderBundle,
    params: ChunkParams,
    fine_tuned: bool = False,
    trace: list[StageTrace] | None = None,
) -> str:
    """Chunk the document by words, summarize each chunk with one generation
    call, and join the per-chunk summaries in chunk order.

    Chunk calls may run concurrently up to the provider cap; join order is
    chunk order regardless of completion order.
    """
    sentences = split_sentences(doc_text)
    chunks = chunk_by_words(sentences, params.max_words, params.overlap_sentences)
    provider = providers.generation(fine_tuned)

    def summarize_chunk(position: int) -> str:
        chunk = chunks[position]
        request = GenerationRequest(prompt=CHUNK_PROMPT_TEMPLATE.format(chunk=chunk.text))
        try:
            return generate(provider, request, providers.retry)
        except ProviderError as err:
            raise StageError(
                "abstractive",
                f"generation failed for chunk {position} ({chunk.chunk_id!r}) "
                f"after {err.attempts} attempts: {err}",
            ) from err

    if not chunks:
        parts: list[str] = []
    elif providers.concurrency > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=providers.concurrency) as pool:
            parts = list(pool.map(summarize_chunk, range(len(chunks))))
    else:
        parts = [summarize_chunk(i) for i in range(len(chunks))]

    output = " ".join(parts)
    if trace is not None:
        trace.append(
            StageTrace("abstractive", len(doc_text), len(output), len(chunks), prompt_template_hash())
        )
    return output


def extractive_stage(
    text: str,
    providers: ProviderBundle,
    budget_sentences: int | None = None,
    trace: list[StageTrace] | None = None,
) -> str:
    """Keep the ``budget_sentences`` most central sentences, original order.

    Centrality is the mean cosine similarity of a sentence's embedding to
    every other sentence; ties go to the earlier sentence. Text with no more
    sentences than the budget is returned unchanged.
    """
    if budget_sentences is None:
        budget_sentences = default_extract_budget(text)
    if budget_sentences < 1:
        raise ValueError(f"budget_sentences must be >= 1, got {budget_sentences}")

    sentences = split_sentences(text)
    if len(sentences) <= budget_sentences:
        if trace is not None:
            trace.append(StageTrace("extractive", len(text), len(text)))
        return text

    try:
        vectors = embed(providers.embedding, [s.text for s in sentences], providers.retry)
    except (ProviderError, ValueError) as err:
        raise StageError("extractive", f"sentence embedding failed: {err}") from err

    n = len(vectors)
    scores = []
    for i in range(n):
        total = sum(cosine_similarity(vectors[i], vectors[j]) for j in range(n) if j != i)
        scores.append(total / (n - 1))

    ranked = sorted(range(n), key=lambda i: (-scores[i], i))
    keep = sorted(ranked[:budget_sentences])
    output = " ".join(sentences[i].text for i in keep)
    if trace is not None:
        trace.append(StageTrace("extractive", len(text), len(output)))
    return output


def summarize_document(
    doc: JudgmentDocument,
    variant: SummarizationVariant,
    providers: ProviderBundle,
    params: ChunkParams | None = None,
    budget_sentences: int | None = None,
) -> Summary:
    """Compose the stages the variant calls for and record the trace."""
    params = params or ChunkParams()
    trace: list[StageTrace] = []
    text = doc.text

    if variant.order is SummaryOrder.EXTRACTIVE_ONLY:
        text = extractive_stage(text, providers, budget_sentences, trace)
    elif variant.order is SummaryOrder.ABSTRACTIVE_ONLY:
        text = abstractive_stage(text, providers, params, variant.fine_tuned, trace)
    elif variant.order is SummaryOrder.EXT_THEN_ABS:
        text = extractive_stage(text, providers, budget_sentences, trace)
        text = abstractive_stage(text, providers, params, variant.fine_tuned, trace)
    elif variant.order is SummaryOrder.ABS_THEN_EXT:
        text = abstractive_stage(text, providers, params, variant.fine_tuned, trace)
        text = extractive_stage(text, providers, budget_sentences, trace)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unhandled order {variant.order}")

    return Summary(doc.doc_id, variant, text, trace)
