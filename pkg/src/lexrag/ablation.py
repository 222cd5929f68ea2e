"""Ablation harness: summarize a corpus under every variant and tabulate
ROUGE-1/2/L recall, precision, and F1.

Averaging is macro (per-document scores averaged with equal weight) and the
normalization applied before scoring is recorded in the report so numbers
stay comparable across runs.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .chunking import ChunkParams
from .corpus import JudgmentDocument
from .providers import ProviderBundle, ProviderError
from .rouge import RougeScore, score_pair
from .summarize import (
    StageError,
    SummarizationVariant,
    ablation_variants,
    summarize_document,
)

NORMALIZATION_NOTE = "lowercase; tokens = maximal alphanumeric runs; no stemming; no stopword removal"
AVERAGING_NOTE = "macro (unweighted mean of per-document scores)"

ROUGE_KINDS = ("rouge1", "rouge2", "rougeL")
METRIC_KINDS = ("recall", "precision", "f1")
_TABLE_TITLES = {"recall": "Recall", "precision": "Precision", "f1": "F1"}
_COLUMN_HEADS = {"rouge1": "ROUGE-1", "rouge2": "ROUGE-2", "rougeL": "ROUGE-L"}


class AblationError(Exception):
    pass


@dataclass
class VariantResult:
    variant: SummarizationVariant
    means: dict[str, RougeScore]          # rouge kind -> macro-averaged score
    docs_scored: int
    failed_doc_ids: list[str] = field(default_factory=list)


@dataclass
class AblationReport:
    results: list[VariantResult]
    corpus_size: int
    params: ChunkParams
    normalization: str = NORMALIZATION_NOTE
    averaging: str = AVERAGING_NOTE

    def result_for(self, label: str) -> VariantResult:
        for result in self.results:
            if result.variant.label == label:
                return result
        raise KeyError(label)

    def to_rows(self) -> list[dict]:
        """Flat machine-readable form: one row per variant x metric x score."""
        rows = []
        for result in self.results:
            for metric in METRIC_KINDS:
                for kind in ROUGE_KINDS:
                    rows.append(
                        {
                            "variant": result.variant.label,
                            "metric": metric,
                            "rouge": kind,
                            "value": getattr(result.means[kind], metric),
                            "docs_scored": result.docs_scored,
                            "failures": len(result.failed_doc_ids),
                            "corpus_size": self.corpus_size,
                            "max_words": self.params.max_words,
                            "overlap_sentences": self.params.overlap_sentences,
                            "normalization": self.normalization,
                            "averaging": self.averaging,
                        }
                    )
        return rows


def _mean_scores(per_doc: list[dict[str, RougeScore]]) -> dict[str, RougeScore]:
    means: dict[str, RougeScore] = {}
    count = len(per_doc)
    for kind in ROUGE_KINDS:
        if count == 0:
            means[kind] = RougeScore(0.0, 0.0, 0.0)
            continue
        means[kind] = RougeScore(
            precision=sum(s[kind].precision for s in per_doc) / count,
            recall=sum(s[kind].recall for s in per_doc) / count,
            f1=sum(s[kind].f1 for s in per_doc) / count,
        )
    return means


def _score_variant(
    variant: SummarizationVariant,
    docs: list[JudgmentDocument],
    references: dict[str, str],
    providers: ProviderBundle,
    params: ChunkParams,
    budget_sentences: int | None,
) -> VariantResult:
    def work(doc: JudgmentDocument) -> dict[str, RougeScore]:
        summary = summarize_document(doc, variant, providers, params, budget_sentences)
        return score_pair(summary.text, references[doc.doc_id])

    per_doc: list[dict[str, RougeScore]] = []
    failed: list[str] = []
    with ThreadPoolExecutor(max_workers=providers.concurrency) as pool:
        futures = [(doc.doc_id, pool.submit(work, doc)) for doc in docs]
        for doc_id, future in futures:
            try:
                per_doc.append(future.result())
            except (StageError, ProviderError):
                failed.append(doc_id)
    return VariantResult(variant, _mean_scores(per_doc), len(per_doc), failed)


def run_ablation(
    docs: list[JudgmentDocument],
    references: dict[str, str],
    variants: list[SummarizationVariant] | None = None,
    providers: ProviderBundle | None = None,
    params: ChunkParams | None = None,
    budget_sentences: int | None = None,
) -> AblationReport:
    """Score every variant over the corpus against reference summaries.

    Every document must have a reference. A document whose summarization
    fails is dropped from that variant's averages and listed in the result.
    """
    if providers is None:
        raise AblationError("a provider bundle is required")
    missing = [doc.doc_id for doc in docs if doc.doc_id not in references]
    if missing:
        raise AblationError(f"missing reference summaries for: {', '.join(sorted(missing))}")

    variants = variants if variants is not None else ablation_variants()
    params = params or ChunkParams()
    results = [
        _score_variant(variant, docs, references, providers, params, budget_sentences)
        for variant in variants
    ]
    return AblationReport(results=results, corpus_size=len(docs), params=params)


def _render_one_table(report: AblationReport, metric: str) -> str:
    label_width = max(len("Summarization Technique"), *(len(r.variant.label) for r in report.results))
    heads = [_COLUMN_HEADS[kind] for kind in ROUGE_KINDS]
    lines = [f"{_TABLE_TITLES[metric]}"]
    lines.append("  ".join([f"{'Summarization Technique':<{label_width}}"] + [f"{h:>8}" for h in heads]))

    best = {
        kind: max(getattr(r.means[kind], metric) for r in report.results)
        for kind in ROUGE_KINDS
    }
    for result in report.results:
        cells = []
        for kind in ROUGE_KINDS:
            value = getattr(result.means[kind], metric)
            mark = "*" if value == best[kind] else " "
            cells.append(f"{value:7.4f}{mark}")
        lines.append("  ".join([f"{result.variant.label:<{label_width}}"] + cells))
    return "\n".join(lines)


def render_tables(report: AblationReport) -> str:
    """Three aligned text tables (recall, precision, F1); the best value in
    each column is starred."""
    header = (
        f"Corpus: {report.corpus_size} documents | normalization: {report.normalization} | "
        f"averaging: {report.averaging}"
    )
    failures = sum(len(r.failed_doc_ids) for r in report.results)
    if failures:
        header += f" | summarization failures: {failures}"
    blocks = [header]
    for metric in METRIC_KINDS:
        blocks.append(_render_one_table(report, metric))
    return "\n\n".join(blocks) + "\n"
