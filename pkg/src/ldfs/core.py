"""End-to-end factual-consistency scoring of a summary against its source.

For each summary sentence: embed it, rank every source sentence by cosine
similarity, keep the top K, expand each kept sentence into a neighbor-window
snippet, score the sentence against each snippet, and keep the maximum. The
summary score is the mean of those per-sentence maxima. Source-sentence
embeddings are computed once per document and reused across summary
sentences and summaries.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .corpus import Document, SummaryRecord
from .embedding import EmbeddingBackend, embed
from .errors import BackendError, InputError
from .retrieval import MetricConfig, build_snippet, retrieve_top_k
from .scoring import ScoreBackend, score_pairs


@dataclass(frozen=True)
class SnippetScore:
    center_index: int
    similarity: float
    score: float

    def to_json(self) -> dict:
        return {"center_index": self.center_index, "similarity": self.similarity, "score": self.score}


@dataclass(frozen=True)
class SentenceResult:
    summary_sentence_index: int
    snippets: tuple[SnippetScore, ...]
    best_score: float

    def to_json(self) -> dict:
        return {
            "summary_sentence_index": self.summary_sentence_index,
            "snippets": [s.to_json() for s in self.snippets],
            "best_score": self.best_score,
        }


@dataclass(frozen=True)
class ScoreReport:
    doc_id: str
    system_id: str
    config: MetricConfig
    sentence_results: tuple[SentenceResult, ...]
    summary_score: float
    scorer_call_count: int
    warnings: tuple[str, ...] = ()
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        obj = {
            "doc_id": self.doc_id,
            "system_id": self.system_id,
            "summary_score": self.summary_score,
            "sentence_results": [r.to_json() for r in self.sentence_results],
            "config": self.config.to_json(),
            "scorer_call_count": self.scorer_call_count,
        }
        if self.warnings:
            obj["warnings"] = list(self.warnings)
        if self.metadata:
            obj["metadata"] = dict(self.metadata)
        return obj


def _backend_metadata(embed_backend, score_backend) -> dict:
    meta = {"embed_backend_id": embed_backend.backend_id, "score_backend_id": score_backend.backend_id}
    variant = getattr(score_backend, "variant", None)
    if variant:
        meta["score_variant"] = str(variant)
    return meta


def score_summary(
    document: Document,
    summary: SummaryRecord,
    config: MetricConfig,
    embed_backend: EmbeddingBackend,
    score_backend: ScoreBackend,
    *,
    strict: bool = False,
    doc_vecs: Sequence[np.ndarray] | None = None,
) -> ScoreReport:
    """Score one summary against one document.

    ``doc_vecs`` lets callers reuse cached source-sentence embeddings;
    otherwise they are computed here (once, shared by all summary sentences).
    """
    if not document.sentences:
        raise InputError(f"document {document.doc_id!r} has no sentences")
    if not summary.sentences:
        raise InputError(f"summary ({summary.doc_id!r}, {summary.system_id!r}) has no sentences")

    if doc_vecs is None:
        doc_vecs = embed(embed_backend, [s.text for s in document.sentences])
    summary_vecs = embed(embed_backend, [s.text for s in summary.sentences])

    k = config.effective_k(len(document.sentences))
    warnings: list[str] = []
    results: list[SentenceResult] = []
    call_count = 0

    for j, sentence in enumerate(summary.sentences):
        if sentence.token_count == 0:
            message = f"summary sentence {j} has no tokens and was skipped"
            if strict:
                raise InputError(f"({summary.doc_id!r}, {summary.system_id!r}): {message}")
            warnings.append(message)
            continue
        top = retrieve_top_k(summary_vecs[j], doc_vecs, k)
        snippets = [
            build_snippet(document, idx, config.neighbor_offsets, similarity=sim) for idx, sim in top
        ]
        try:
            scores = score_pairs(score_backend, [(sentence.text, sn.text) for sn in snippets])
        except BackendError as exc:
            raise BackendError(
                f"scoring failed for ({summary.doc_id!r}, {summary.system_id!r}) "
                f"summary sentence {j}: {exc}"
            ) from exc
        call_count += len(snippets)
        scored = tuple(
            SnippetScore(center_index=sn.center_index, similarity=sn.similarity, score=sc)
            for sn, sc in zip(snippets, scores)
        )
        results.append(
            SentenceResult(summary_sentence_index=j, snippets=scored, best_score=max(scores))
        )

    if not results:
        raise InputError(
            f"summary ({summary.doc_id!r}, {summary.system_id!r}) has no scorable sentences"
        )
    summary_score = sum(r.best_score for r in results) / len(results)
    return ScoreReport(
        doc_id=summary.doc_id,
        system_id=summary.system_id,
        config=config,
        sentence_results=tuple(results),
        summary_score=summary_score,
        scorer_call_count=call_count,
        warnings=tuple(warnings),
        metadata=_backend_metadata(embed_backend, score_backend),
    )


def score_summary_exhaustive(
    document: Document,
    summary: SummaryRecord,
    config: MetricConfig,
    score_backend: ScoreBackend,
    *,
    strict: bool = False,
) -> ScoreReport:
    """Full scan without any embedding or similarity computation.

    Every source sentence becomes a snippet center for every summary
    sentence. Used by the benchmark harness to isolate the cost saved by
    similarity-based candidate selection; similarities are reported as 0.
    """
    if not document.sentences:
        raise InputError(f"document {document.doc_id!r} has no sentences")
    if not summary.sentences:
        raise InputError(f"summary ({summary.doc_id!r}, {summary.system_id!r}) has no sentences")

    warnings: list[str] = []
    results: list[SentenceResult] = []
    call_count = 0
    for j, sentence in enumerate(summary.sentences):
        if sentence.token_count == 0:
            message = f"summary sentence {j} has no tokens and was skipped"
            if strict:
                raise InputError(f"({summary.doc_id!r}, {summary.system_id!r}): {message}")
            warnings.append(message)
            continue
        snippets = [
            build_snippet(document, idx, config.neighbor_offsets)
            for idx in range(len(document.sentences))
        ]
        scores = score_pairs(score_backend, [(sentence.text, sn.text) for sn in snippets])
        call_count += len(snippets)
        scored = tuple(
            SnippetScore(center_index=sn.center_index, similarity=sn.similarity, score=sc)
            for sn, sc in zip(snippets, scores)
        )
        results.append(
            SentenceResult(summary_sentence_index=j, snippets=scored, best_score=max(scores))
        )
    if not results:
        raise InputError(
            f"summary ({summary.doc_id!r}, {summary.system_id!r}) has no scorable sentences"
        )
    summary_score = sum(r.best_score for r in results) / len(results)
    return ScoreReport(
        doc_id=summary.doc_id,
        system_id=summary.system_id,
        config=config,
        sentence_results=tuple(results),
        summary_score=summary_score,
        scorer_call_count=call_count,
        warnings=tuple(warnings),
        metadata={"mode": "exhaustive-no-similarity", "score_backend_id": score_backend.backend_id},
    )


class DocumentEmbeddingCache:
    """Per-document source-sentence embeddings, computed once per backend."""

    def __init__(self, embed_backend: EmbeddingBackend):
        self._backend = embed_backend
        self._cache: dict[str, list[np.ndarray]] = {}
        self._lock = threading.Lock()

    def get(self, document: Document) -> list[np.ndarray]:
        with self._lock:
            cached = self._cache.get(document.doc_id)
        if cached is not None:
            return cached
        vecs = embed(self._backend, [s.text for s in document.sentences])
        with self._lock:
            return self._cache.setdefault(document.doc_id, vecs)


def score_corpus(
    documents: Iterable[Document],
    summaries: Sequence[SummaryRecord],
    config: MetricConfig,
    embed_backend: EmbeddingBackend,
    score_backend: ScoreBackend,
    *,
    strict: bool = False,
    jobs: int = 1,
) -> list[ScoreReport]:
    """One report per summary, in input order.

    Each referenced document is embedded exactly once up front; summaries may
    then be scored in parallel (``jobs`` threads) without changing any output
    bit, because results are assembled by input index.
    """
    by_id = {d.doc_id: d for d in documents}
    for summary in summaries:
        if summary.doc_id not in by_id:
            raise InputError(
                f"summary ({summary.doc_id!r}, {summary.system_id!r}) references a missing document"
            )
    cache = DocumentEmbeddingCache(embed_backend)
    for doc_id in dict.fromkeys(s.doc_id for s in summaries):
        cache.get(by_id[doc_id])

    def one(summary: SummaryRecord) -> ScoreReport:
        document = by_id[summary.doc_id]
        return score_summary(
            document,
            summary,
            config,
            embed_backend,
            score_backend,
            strict=strict,
            doc_vecs=cache.get(document),
        )

    if jobs <= 1 or len(summaries) <= 1:
        return [one(s) for s in summaries]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, summaries))
