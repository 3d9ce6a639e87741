"""Sentence-embedding backends and cosine similarity.

All backends return L2-normalized float64 vectors; empty or whitespace-only
text maps to the zero vector, and ``cosine`` treats a zero vector as having
similarity 0 to everything. Normalizing at ingestion keeps the retrieval
inner loop a plain dot product.
"""

from __future__ import annotations

import threading
from typing import Protocol, Sequence

import numpy as np

from . import segmenter
from .client import ModelServerClient
from .errors import BackendError, InputError

HASHED_DIM = 256

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a_64(data: bytes) -> int:
    """64-bit FNV-1a hash of ``data``."""
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & _MASK64
    return h


def hashed_bucket(token: str) -> int:
    """Index a token occupies in a hashed embedding (for collision checks)."""
    return fnv1a_64(token.encode("utf-8")) % HASHED_DIM


def hashed_embed(text: str) -> np.ndarray:
    """Deterministic bag-of-tokens embedding: FNV-1a bucket counts, L2-normalized."""
    vec = np.zeros(HASHED_DIM, dtype=np.float64)
    tokens = segmenter.tokenize(text)
    if not tokens:
        return vec
    for token in tokens:
        vec[hashed_bucket(token)] += 1.0
    return vec / np.linalg.norm(vec)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; 0 when either vector is zero."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(min(1.0, max(-1.0, float(np.dot(a, b)) / (na * nb))))


class EmbeddingBackend(Protocol):
    """Deterministic text-to-vector backend; batch and single calls agree."""

    backend_id: str
    dim: int

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]: ...


def embed(backend: EmbeddingBackend, texts: Sequence[str]) -> list[np.ndarray]:
    """Embed ``texts`` through ``backend`` and enforce the vector contract.

    One vector per input, order-preserving, uniform dimension, and each
    vector either unit-norm (within 1e-6) or exactly zero.
    """
    vectors = backend.embed(list(texts))
    if len(vectors) != len(texts):
        raise BackendError(
            f"backend {backend.backend_id!r} returned {len(vectors)} vectors for {len(texts)} texts"
        )
    for i, vec in enumerate(vectors):
        if vec.shape != (backend.dim,):
            raise BackendError(
                f"backend {backend.backend_id!r} returned dim {vec.shape} at position {i}, "
                f"expected ({backend.dim},)"
            )
        if not np.all(np.isfinite(vec)):
            raise BackendError(f"backend {backend.backend_id!r} returned non-finite values at {i}")
        norm = float(np.linalg.norm(vec))
        if norm != 0.0 and abs(norm - 1.0) > 1e-6:
            raise BackendError(
                f"backend {backend.backend_id!r} returned non-normalized vector (norm {norm}) at {i}"
            )
    return vectors


class HashedEmbedding:
    """Offline 256-dim hashed backend used for tests and degraded mode."""

    backend_id = "hashed"
    dim = HASHED_DIM

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [hashed_embed(t) for t in texts]


class RemoteEmbedding:
    """Embedding backend served over the model-server protocol.

    Empty and whitespace-only texts are resolved locally to zero vectors;
    everything else goes to the server in one batch per call.
    """

    def __init__(self, client: ModelServerClient):
        self._client = client
        info = client.info()
        embed_info = info.get("embed", {})
        self.backend_id = f"remote:{embed_info.get('backend_id', 'unknown')}"
        self.dim = int(embed_info.get("dim", 0))
        if self.dim <= 0:
            raise BackendError(f"server did not declare an embedding dimension: {info!r}")

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        out: list[np.ndarray | None] = [None] * len(texts)
        live: list[tuple[int, str]] = []
        for i, text in enumerate(texts):
            if text.strip():
                live.append((i, text))
            else:
                out[i] = np.zeros(self.dim, dtype=np.float64)
        if live:
            vectors, dim = self._client.embed([t for _, t in live])
            if dim != self.dim:
                raise BackendError(f"server changed embedding dim from {self.dim} to {dim}")
            if len(vectors) != len(live):
                raise BackendError(
                    f"server returned {len(vectors)} vectors for {len(live)} texts"
                )
            for (i, _), vec in zip(live, vectors):
                out[i] = np.asarray(vec, dtype=np.float64)
        return [v for v in out if v is not None]


class CountingEmbedding:
    """Wrapper that counts embed calls and texts (manifest/benchmark plumbing)."""

    def __init__(self, inner: EmbeddingBackend):
        self.inner = inner
        self.backend_id = inner.backend_id
        self.dim = inner.dim
        self.calls = 0
        self.texts = 0
        self._lock = threading.Lock()

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        with self._lock:
            self.calls += 1
            self.texts += len(texts)
        return self.inner.embed(texts)
