"""In-process vector store: exact cosine top-k with metadata filtering.

The scan is exhaustive, not approximate; at the corpus sizes this engine
targets (tens of thousands of chunks) a NumPy matmul beats any index
structure. The on-disk format is little-endian binary with a CRC-32
trailer so round trips are bit-exact and corruption is detected.
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .chunking import Chunk
from .providers import EmbeddingVector

MAGIC = b"LXVI"
FORMAT_VERSION = 1


class VectorStoreError(Exception):
    pass


class DimensionMismatchError(VectorStoreError):
    pass


class DuplicateChunkError(VectorStoreError):
    pass


class ZeroNormError(VectorStoreError):
    pass


class IndexFormatError(VectorStoreError):
    """Bad magic or unsupported format version."""


class IndexChecksumError(VectorStoreError):
    """Stored CRC-32 does not match the file contents."""


@dataclass(frozen=True)
class SearchHit:
    vector_id: int
    score: float
    chunk: Chunk
    metadata: dict[str, str]


def _as_array(vector) -> np.ndarray:
    values = vector.values if isinstance(vector, EmbeddingVector) else vector
    return np.asarray(values, dtype=np.float64)


def cosine_similarity(a, b) -> float:
    """dot(a, b) / (|a| * |b|). Zero-norm inputs raise, never return 0."""
    va, vb = _as_array(a), _as_array(b)
    if va.shape != vb.shape:
        raise DimensionMismatchError(f"dims differ: {va.shape[0]} vs {vb.shape[0]}")
    norm_a = float(np.linalg.norm(va))
    norm_b = float(np.linalg.norm(vb))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroNormError("cosine similarity undefined for zero-norm vector")
    return float(np.dot(va, vb) / (norm_a * norm_b))


MetadataFilter = Callable[[dict[str, str]], bool] | dict[str, str] | None


def _as_predicate(filter: MetadataFilter) -> Callable[[dict[str, str]], bool] | None:
    if filter is None or callable(filter):
        return filter
    constraints = dict(filter)
    return lambda metadata: all(metadata.get(k) == v for k, v in constraints.items())


class VectorIndex:
    """Insertion-ordered store of embedded chunks with exact top-k search.

    Safe for many concurrent readers or a single writer; persistence needs
    exclusive access.
    """

    def __init__(self, dim: int | None = None, fingerprint: str = ""):
        self.dim = dim
        self.fingerprint = fingerprint
        self._vectors: list[np.ndarray] = []
        self._chunks: list[Chunk] = []
        self._metadata: list[dict[str, str]] = []
        self._seen_spans: set[tuple[str, str, int, int]] = set()
        self._matrix: np.ndarray | None = None
        self._norms: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self._vectors)

    def insert(self, chunk: Chunk, vector: EmbeddingVector, metadata: dict[str, str] | None = None) -> int:
        """Add one embedded chunk; returns its insertion-ordered id."""
        if self.dim is None:
            self.dim = vector.dim
        if vector.dim != self.dim:
            raise DimensionMismatchError(f"vector dim {vector.dim} != index dim {self.dim}")
        arr = _as_array(vector)
        if not np.all(np.isfinite(arr)):
            raise VectorStoreError("vector contains non-finite values")
        if float(np.linalg.norm(arr)) == 0.0:
            raise ZeroNormError("refusing to insert zero-norm vector")
        span = (chunk.doc_id, chunk.unit, chunk.start, chunk.end)
        if span in self._seen_spans:
            raise DuplicateChunkError(f"chunk span already indexed: {span}")
        self._seen_spans.add(span)
        self._vectors.append(arr)
        self._chunks.append(chunk)
        self._metadata.append(dict(metadata or {}))
        self._matrix = None
        return len(self._vectors) - 1

    def _ensure_matrix(self) -> None:
        if self._matrix is None:
            self._matrix = np.vstack(self._vectors)
            self._norms = np.linalg.norm(self._matrix, axis=1)

    def top_k(self, query: EmbeddingVector, k: int, filter: MetadataFilter = None) -> list[SearchHit]:
        """The k highest-cosine entries passing the filter, exact full scan.

        Hits come back sorted by score descending, ties broken by ascending
        vector id. Fewer than k hits are returned iff fewer entries match.
        """
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if len(self._vectors) == 0:
            return []
        if self.dim is not None and query.dim != self.dim:
            raise DimensionMismatchError(f"query dim {query.dim} != index dim {self.dim}")
        q = _as_array(query)
        q_norm = float(np.linalg.norm(q))
        if q_norm == 0.0:
            raise ZeroNormError("cosine similarity undefined for zero-norm query")

        predicate = _as_predicate(filter)
        if predicate is None:
            ids = np.arange(len(self._vectors))
        else:
            ids = np.array(
                [i for i, meta in enumerate(self._metadata) if predicate(meta)], dtype=np.int64
            )
            if ids.size == 0:
                return []

        self._ensure_matrix()
        matrix = self._matrix[ids]
        norms = self._norms[ids]
        scores = (matrix @ q) / (norms * q_norm)
        order = np.lexsort((ids, -scores))[:k]
        return [
            SearchHit(int(ids[i]), float(scores[i]), self._chunks[ids[i]], dict(self._metadata[ids[i]]))
            for i in order
        ]

    def entries(self) -> Iterable[tuple[int, Chunk, dict[str, str]]]:
        for i, (chunk, meta) in enumerate(zip(self._chunks, self._metadata)):
            yield i, chunk, dict(meta)

    # -- persistence ---------------------------------------------------------
    #
    # Layout: MAGIC | u32 version | u32 dim | u64 count | u32 fp_len | fp utf-8
    #         | count*dim float64 | u64 meta_len | meta JSON utf-8 | u32 CRC-32
    # The CRC covers every byte before the trailer.

    def persist(self, path: str | Path) -> None:
        dim = self.dim or 0
        header = MAGIC + struct.pack("<IIQ", FORMAT_VERSION, dim, len(self._vectors))
        fp = self.fingerprint.encode("utf-8")
        header += struct.pack("<I", len(fp)) + fp

        if self._vectors:
            vector_block = np.vstack(self._vectors).astype("<f8").tobytes()
        else:
            vector_block = b""

        meta = {
            "entries": [
                {
                    "vector_id": i,
                    "chunk": {
                        "chunk_id": chunk.chunk_id,
                        "doc_id": chunk.doc_id,
                        "text": chunk.text,
                        "unit": chunk.unit,
                        "start": chunk.start,
                        "end": chunk.end,
                        "oversize": chunk.oversize,
                    },
                    "metadata": metadata,
                }
                for i, chunk, metadata in self.entries()
            ]
        }
        meta_block = json.dumps(meta, sort_keys=True, ensure_ascii=False).encode("utf-8")

        payload = header + vector_block + struct.pack("<Q", len(meta_block)) + meta_block
        with open(path, "wb") as handle:
            handle.write(payload)
            handle.write(struct.pack("<I", zlib.crc32(payload)))

    @classmethod
    def load(cls, path: str | Path) -> "VectorIndex":
        data = Path(path).read_bytes()
        if len(data) < 4:
            raise IndexChecksumError("file truncated: no checksum trailer")
        payload, trailer = data[:-4], data[-4:]
        (stored_crc,) = struct.unpack("<I", trailer)
        if zlib.crc32(payload) != stored_crc:
            raise IndexChecksumError("checksum mismatch: file corrupt or truncated")

        if len(payload) < 24 or payload[:4] != MAGIC:
            raise IndexFormatError("not a vector index file (bad magic)")
        version, dim, count = struct.unpack("<IIQ", payload[4:20])
        if version != FORMAT_VERSION:
            raise IndexFormatError(f"unsupported format version {version}")
        (fp_len,) = struct.unpack("<I", payload[20:24])
        offset = 24
        fingerprint = payload[offset : offset + fp_len].decode("utf-8")
        offset += fp_len

        vector_bytes = count * dim * 8
        vectors = np.frombuffer(payload[offset : offset + vector_bytes], dtype="<f8").reshape(
            count, dim
        )
        offset += vector_bytes
        (meta_len,) = struct.unpack("<Q", payload[offset : offset + 8])
        offset += 8
        meta = json.loads(payload[offset : offset + meta_len].decode("utf-8"))

        index = cls(dim=dim if count else (dim or None), fingerprint=fingerprint)
        for entry in meta["entries"]:
            c = entry["chunk"]
            chunk = Chunk(
                c["chunk_id"], c["doc_id"], c["text"], c["unit"], c["start"], c["end"], c["oversize"]
            )
            vector = EmbeddingVector(tuple(float(v) for v in vectors[entry["vector_id"]]), dim)
            index.insert(chunk, vector, entry["metadata"])
        return index
