"""HTTP API over the query pipeline and the annotated corpus.

Read-only JSON endpoints under /api (versioned by prefix so the UI has a
stable contract), a liveness probe, and an optional static mount for the
bundled interface. Degraded answers are 200 responses with the flag set:
retrieval evidence is still useful when generation is down.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, replace
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .config import AppConfig
from .corpus import AnnotationRecord, case_type_distribution, load_annotations
from .providers import ProviderBundle, ProviderError
from .rag import FingerprintMismatchError, RagConfig, answer_query, overview_to_dict
from .vectorstore import VectorIndex

PAGE_SIZE = 20


class QueryBody(BaseModel):
    query: str
    k: int | None = None
    filters: dict[str, str] | None = None


@dataclass
class AppState:
    providers: ProviderBundle
    rag_config: RagConfig
    index: VectorIndex | None = None
    annotations: dict[str, AnnotationRecord] | None = None
    summaries: dict[str, str] | None = None
    max_inflight: int = 8

    def __post_init__(self) -> None:
        self.gate = threading.Semaphore(self.max_inflight)


def _annotation_payload(record: AnnotationRecord) -> dict:
    return {
        "doc_id": record.doc_id,
        "case_name": record.case_name,
        "date": record.date,
        "appellant": record.appellant,
        "respondent": record.respondent,
        "judges": list(record.judges),
        "citations": list(record.citations),
        "related_provisions": list(record.related_provisions),
        "case_type": record.case_type,
        "judgement": record.judgement,
        "summary": record.summary,
        "outcome_of_appellant": record.outcome_of_appellant,
    }


def build_state(config: AppConfig) -> AppState:
    """Load whatever artifacts exist; endpoints answer 503 for the rest."""
    providers = config.provider_bundle()
    index = None
    if config.index_path and Path(config.index_path).exists():
        index = VectorIndex.load(config.index_path)
    annotations = None
    if config.annotations_path and Path(config.annotations_path).exists():
        annotations = {r.doc_id: r for r in load_annotations(config.annotations_path)}
    summaries = None
    if config.summaries_path and Path(config.summaries_path).exists():
        data = json.loads(Path(config.summaries_path).read_text(encoding="utf-8"))
        summaries = {s["doc_id"]: s["text"] for s in data.get("summaries", [])}
    return AppState(
        providers=providers,
        rag_config=config.rag,
        index=index,
        annotations=annotations,
        summaries=summaries,
    )


def create_app(
    config: AppConfig | None = None,
    state: AppState | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    if state is None:
        state = build_state(config or AppConfig())

    app = FastAPI(title="lexrag", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.post("/api/query")
    def post_query(body: QueryBody) -> dict:
        if state.index is None or len(state.index) == 0:
            raise HTTPException(status_code=503, detail="index not loaded")
        query = body.query.strip()
        if not query:
            raise HTTPException(status_code=400, detail="query must be non-empty")
        k = body.k if body.k is not None else state.rag_config.k
        if k < 1:
            raise HTTPException(status_code=400, detail="k must be >= 1")
        if not state.gate.acquire(blocking=False):
            raise HTTPException(status_code=429, detail="server at capacity, retry shortly")
        try:
            rag_config = replace(state.rag_config, k=k)
            metadata_filter = dict(body.filters) if body.filters else None
            timings: dict[str, float] = {}
            try:
                overview = answer_query(
                    query,
                    state.index,
                    state.providers,
                    rag_config,
                    state.annotations or {},
                    timings,
                    metadata_filter,
                )
            except FingerprintMismatchError as err:
                raise HTTPException(status_code=409, detail=str(err)) from err
            except ProviderError as err:
                raise HTTPException(
                    status_code=503, detail=f"embedding provider unavailable: {err}"
                ) from err
            payload = overview_to_dict(overview)
            payload["timings"] = {key: round(ms, 3) for key, ms in timings.items()}
            return payload
        finally:
            state.gate.release()

    @app.get("/api/cases/{doc_id}")
    def get_case(doc_id: str) -> dict:
        if state.annotations is None:
            raise HTTPException(status_code=503, detail="annotations not loaded")
        record = state.annotations.get(doc_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown doc_id: {doc_id}")
        payload = _annotation_payload(record)
        payload["generated_summary"] = (state.summaries or {}).get(doc_id, "")
        return payload

    @app.get("/api/cases")
    def list_cases(
        case_type: str | None = Query(default=None, alias="type"),
        page: int = Query(default=1, ge=1),
    ) -> dict:
        if state.annotations is None:
            raise HTTPException(status_code=503, detail="annotations not loaded")
        records = sorted(state.annotations.values(), key=lambda r: (r.date, r.doc_id))
        if case_type is not None:
            records = [r for r in records if r.case_type == case_type]
        total = len(records)
        start = (page - 1) * PAGE_SIZE
        page_records = records[start : start + PAGE_SIZE]
        return {
            "cases": [_annotation_payload(r) for r in page_records],
            "total": total,
            "page": page,
            "page_size": PAGE_SIZE,
        }

    @app.get("/api/stats")
    def stats() -> dict:
        if state.annotations is None:
            raise HTTPException(status_code=503, detail="annotations not loaded")
        return case_type_distribution(list(state.annotations.values()))

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
