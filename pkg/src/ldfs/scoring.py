"""Pairwise conditional text scorers behind one interface, plus the
truncating whole-document baseline.

Every backend scores "target given context" with the fixed direction
*higher = more factually consistent* and must be deterministic for fixed
inputs. The offline ``LexicalScorer`` mirrors the per-token-averaged
log-likelihood shape of generative scorers without any model weights.
"""

from __future__ import annotations

import math
import threading
import time
from collections import Counter
from typing import Protocol, Sequence

from . import segmenter
from .client import ModelServerClient
from .corpus import Document
from .errors import BackendError, ConfigError, InputError

DIRECTION = "higher = more factually consistent"

_SMOOTHING = 0.1
DEFAULT_TOKEN_LIMIT = 1024


class ScoreBackend(Protocol):
    backend_id: str
    token_limit: int | None  # None = unlimited

    def score_pairs(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        """Scores for (target, context) pairs, order-preserving."""
        ...


def lexical_score(target: str, context: str) -> float:
    """Mean log-probability of target tokens under a smoothed unigram model
    of the context.

    The vocabulary is the union of the pair's token types and the smoothing
    constant is 0.1, so the score is self-contained and deterministic. Always
    <= 0; an empty context makes every smoothed probability 0.1/(0.1*V) and
    in particular scores 0 when the target has a single token type.
    """
    target_tokens = segmenter.tokenize(target)
    if not target_tokens:
        raise InputError("lexical_score: target has no tokens")
    context_tokens = segmenter.tokenize(context)
    vocab_size = len(set(target_tokens) | set(context_tokens))
    counts = Counter(context_tokens)
    denom = len(context_tokens) + _SMOOTHING * vocab_size
    total = 0.0
    for token in target_tokens:
        total += math.log((counts[token] + _SMOOTHING) / denom)
    return total / len(target_tokens)


def score_pair(backend: ScoreBackend, target: str, context: str) -> float:
    """Score one (target, context) pair through ``backend``."""
    return score_pairs(backend, [(target, context)])[0]


def score_pairs(backend: ScoreBackend, pairs: Sequence[tuple[str, str]]) -> list[float]:
    """Validated batch scoring: non-empty targets in, finite floats out."""
    for i, (target, _) in enumerate(pairs):
        if not segmenter.tokenize(target):
            raise InputError(f"score target at position {i} has no tokens")
    scores = backend.score_pairs(list(pairs))
    if len(scores) != len(pairs):
        raise BackendError(
            f"backend {backend.backend_id!r} returned {len(scores)} scores for {len(pairs)} pairs"
        )
    for i, s in enumerate(scores):
        if not math.isfinite(s):
            raise BackendError(f"backend {backend.backend_id!r} returned non-finite score at {i}")
    return scores


class LexicalScorer:
    """Offline deterministic scorer built on ``lexical_score``."""

    backend_id = "lexical"
    variant = "mean-log-smoothed-unigram"

    def __init__(self, token_limit: int | None = None):
        self.token_limit = token_limit

    def score_pairs(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        return [lexical_score(target, context) for target, context in pairs]


class ConstantScorer:
    """Fixed-score backend for benchmarking; optional simulated latency."""

    def __init__(self, value: float = 0.0, latency_s: float = 0.0, token_limit: int | None = None):
        self.value = value
        self.latency_s = latency_s
        self.token_limit = token_limit
        self.backend_id = "noop" if latency_s == 0.0 else f"noop-{latency_s * 1000:g}ms"

    def score_pairs(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        if self.latency_s > 0.0:
            for _ in pairs:
                time.sleep(self.latency_s)
        return [self.value] * len(pairs)


class RemoteScorer:
    """Conditional-likelihood scorer served over the model-server protocol."""

    def __init__(self, client: ModelServerClient):
        self._client = client
        info = client.info()
        score_info = info.get("score", {})
        self.backend_id = f"remote:{score_info.get('backend_id', 'unknown')}"
        self.variant = str(score_info.get("variant", "unknown"))
        limit = score_info.get("token_limit")
        self.token_limit = int(limit) if limit else None

    def score_pairs(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        scores, variant = self._client.score(pairs)
        self.variant = variant
        return scores


class CountingScorer:
    """Wrapper that counts scored pairs (manifest/benchmark plumbing)."""

    def __init__(self, inner: ScoreBackend):
        self.inner = inner
        self.backend_id = inner.backend_id
        self.token_limit = inner.token_limit
        self.calls = 0
        self.pairs = 0
        self._lock = threading.Lock()

    @property
    def variant(self):
        return getattr(self.inner, "variant", None)

    def score_pairs(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        with self._lock:
            self.calls += 1
            self.pairs += len(pairs)
        return self.inner.score_pairs(pairs)


def truncate_to_tokens(text: str, limit: int) -> str:
    """Cut ``text`` at the end of its ``limit``-th token (original bytes kept)."""
    if limit < 0:
        raise ConfigError(f"token limit must be >= 0, got {limit}")
    if limit == 0:
        return ""
    end = 0
    for n, match in enumerate(segmenter._TOKEN_RE.finditer(text), start=1):
        end = match.end()
        if n == limit:
            return text[:end]
    return text


def truncating_baseline_score(backend: ScoreBackend, summary_text: str, document: Document) -> float:
    """Whole-summary score against the first ``token_limit`` document tokens.

    This is the conventional single-call application of a metric to a long
    document: everything past the backend's token limit is invisible to it.
    """
    if backend.token_limit is None:
        raise ConfigError(
            f"backend {backend.backend_id!r} has no token limit; the truncating baseline needs one"
        )
    truncated = truncate_to_tokens(document.text, backend.token_limit)
    return score_pair(backend, summary_text, truncated)
