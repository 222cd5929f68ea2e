"""Application configuration: a JSON file with nested sections, validated
into typed settings.

Precedence is flags > environment variables > config file > built-in
defaults. Environment variables carry credentials only (named per endpoint
via ``api_key_env``); every other setting comes from flags or the file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .chunking import ChunkParams
from .providers import (
    EndpointConfig,
    HttpEmbeddingProvider,
    HttpGenerationProvider,
    ProviderBundle,
    RetryPolicy,
    mock_bundle,
)
from .rag import RagConfig


class ConfigError(Exception):
    pass


_TOP_LEVEL_KEYS = {
    "mock",
    "mock_dim",
    "chunking",
    "rag",
    "providers",
    "service",
    "index_path",
    "corpus_dir",
    "annotations_path",
    "summaries_path",
    "concurrency",
}
_CHUNKING_KEYS = {"max_words", "overlap_sentences", "max_tokens", "overlap_tokens"}
_RAG_KEYS = {"k", "max_context_tokens", "prompt_template_version", "answer_language"}
_PROVIDER_SLOTS = ("generation_base", "generation_fine_tuned", "embedding")
_ENDPOINT_KEYS = {"url", "model", "api_key_env", "timeout", "dim"}
_SERVICE_KEYS = {"host", "port"}


@dataclass
class AppConfig:
    mock: bool = True
    mock_dim: int = 64
    generation_base: EndpointConfig | None = None
    generation_fine_tuned: EndpointConfig | None = None
    embedding: EndpointConfig | None = None
    embedding_dim: int = 64
    chunk_params: ChunkParams = field(default_factory=ChunkParams)
    rag: RagConfig = field(default_factory=RagConfig)
    index_path: str = "index.lxvi"
    corpus_dir: str | None = None
    annotations_path: str | None = None
    summaries_path: str | None = None
    concurrency: int = 4
    host: str = "127.0.0.1"
    port: int = 8000

    def validate(self) -> None:
        endpoints = (self.generation_base, self.generation_fine_tuned, self.embedding)
        if self.mock and any(e is not None for e in endpoints):
            raise ConfigError("mock mode must not configure provider endpoints")
        if not self.mock:
            missing = [
                slot for slot, e in zip(_PROVIDER_SLOTS, endpoints) if e is None
            ]
            if missing:
                raise ConfigError(f"live mode requires endpoints: {', '.join(missing)}")
        if self.concurrency < 1:
            raise ConfigError(f"concurrency must be >= 1, got {self.concurrency}")

    def provider_bundle(self) -> ProviderBundle:
        self.validate()
        if self.mock:
            return mock_bundle(dim=self.mock_dim, concurrency=self.concurrency)
        return ProviderBundle(
            generation_base=HttpGenerationProvider(self.generation_base, "generation-base"),
            generation_fine_tuned=HttpGenerationProvider(
                self.generation_fine_tuned, "generation-fine-tuned"
            ),
            embedding=HttpEmbeddingProvider(self.embedding, self.embedding_dim, "embedding"),
            concurrency=self.concurrency,
            retry=RetryPolicy(),
        )


def _reject_unknown(section: str, data: dict, allowed: set[str]) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown {section} keys: {', '.join(unknown)}")


def _endpoint_from(section: str, data: dict) -> tuple[EndpointConfig, int | None]:
    _reject_unknown(section, data, _ENDPOINT_KEYS)
    if "url" not in data:
        raise ConfigError(f"{section}: url is required")
    endpoint = EndpointConfig(
        url=str(data["url"]),
        model=str(data.get("model", "")),
        api_key_env=str(data.get("api_key_env", "")),
        timeout=float(data.get("timeout", 30.0)),
    )
    dim = data.get("dim")
    return endpoint, (int(dim) if dim is not None else None)


def load_config(path: str | Path) -> AppConfig:
    """Parse and validate a JSON config file."""
    source = Path(path)
    try:
        data = json.loads(source.read_text(encoding="utf-8"))
    except OSError as err:
        raise ConfigError(f"cannot read config file {source}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"config file {source} is not valid JSON: {err}") from err
    if not isinstance(data, dict):
        raise ConfigError(f"config file {source} must hold an object at top level")
    return config_from_mapping(data)


def config_from_mapping(data: dict) -> AppConfig:
    _reject_unknown("config", data, _TOP_LEVEL_KEYS)
    config = AppConfig()

    if "mock" in data:
        config.mock = bool(data["mock"])
    if "mock_dim" in data:
        config.mock_dim = int(data["mock_dim"])

    chunking = data.get("chunking", {})
    _reject_unknown("chunking", chunking, _CHUNKING_KEYS)
    try:
        config.chunk_params = ChunkParams(
            max_words=int(chunking.get("max_words", 200)),
            overlap_sentences=int(chunking.get("overlap_sentences", 2)),
            max_tokens=int(chunking.get("max_tokens", 1024)),
            overlap_tokens=int(chunking.get("overlap_tokens", 100)),
        )
    except ValueError as err:
        raise ConfigError(str(err)) from err

    rag = data.get("rag", {})
    _reject_unknown("rag", rag, _RAG_KEYS)
    try:
        config.rag = RagConfig(
            k=int(rag.get("k", 3)),
            max_context_tokens=int(rag.get("max_context_tokens", 3072)),
            prompt_template_version=str(rag.get("prompt_template_version", "1")),
            answer_language=str(rag.get("answer_language", "en")),
        )
    except ValueError as err:
        raise ConfigError(str(err)) from err

    providers = data.get("providers", {})
    _reject_unknown("providers", providers, set(_PROVIDER_SLOTS))
    if "generation_base" in providers:
        config.generation_base, _ = _endpoint_from("generation_base", providers["generation_base"])
    if "generation_fine_tuned" in providers:
        config.generation_fine_tuned, _ = _endpoint_from(
            "generation_fine_tuned", providers["generation_fine_tuned"]
        )
    if "embedding" in providers:
        config.embedding, dim = _endpoint_from("embedding", providers["embedding"])
        if dim is not None:
            config.embedding_dim = dim

    service = data.get("service", {})
    _reject_unknown("service", service, _SERVICE_KEYS)
    config.host = str(service.get("host", config.host))
    config.port = int(service.get("port", config.port))

    if "index_path" in data:
        config.index_path = str(data["index_path"])
    if "corpus_dir" in data:
        config.corpus_dir = str(data["corpus_dir"])
    if "annotations_path" in data:
        config.annotations_path = str(data["annotations_path"])
    if "summaries_path" in data:
        config.summaries_path = str(data["summaries_path"])
    if "concurrency" in data:
        config.concurrency = int(data["concurrency"])

    config.validate()
    return config
