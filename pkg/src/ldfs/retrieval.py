"""Evidence retrieval: rank source sentences by cosine similarity and build
neighbor-window snippets around the best candidates.

Ties are broken by lower document index and window clamping omits (never
pads) out-of-range neighbors, so retrieval is fully deterministic and the
top-k set is always a prefix of the top-(k+1) set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .corpus import Document
from .embedding import cosine
from .errors import ConfigError, InputError

DEFAULT_K = 3
DEFAULT_NEIGHBOR_OFFSETS = (-1, 0, 1)

# Sentinel for "consider every source sentence" in configs and CLI flags.
FULL_SCAN = "I"


@dataclass(frozen=True)
class MetricConfig:
    """Retrieval/scoring parameters: K, the neighbor window, and backend ids.

    ``k=None`` means a full scan (every source sentence is a candidate);
    it is serialized as the string "I".
    """

    k: int | None = DEFAULT_K
    neighbor_offsets: tuple[int, ...] = DEFAULT_NEIGHBOR_OFFSETS
    embed_backend_id: str = "hashed"
    score_backend_id: str = "lexical"

    def __post_init__(self):
        if self.k is not None and (not isinstance(self.k, int) or self.k < 1):
            raise ConfigError(f"k must be a positive integer or None for a full scan, got {self.k!r}")
        offsets = tuple(self.neighbor_offsets)
        if 0 not in offsets:
            raise ConfigError("neighbor_offsets must contain 0")
        if len(set(offsets)) != len(offsets):
            raise ConfigError(f"neighbor_offsets contains duplicates: {offsets}")
        object.__setattr__(self, "neighbor_offsets", tuple(sorted(offsets)))

    def effective_k(self, doc_sentence_count: int) -> int:
        if self.k is None:
            return doc_sentence_count
        return min(self.k, doc_sentence_count)

    def to_json(self) -> dict:
        return {
            "k": FULL_SCAN if self.k is None else self.k,
            "neighbor_offsets": list(self.neighbor_offsets),
            "embed_backend_id": self.embed_backend_id,
            "score_backend_id": self.score_backend_id,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MetricConfig":
        k = obj.get("k", DEFAULT_K)
        return cls(
            k=None if k == FULL_SCAN else k,
            neighbor_offsets=tuple(obj.get("neighbor_offsets", DEFAULT_NEIGHBOR_OFFSETS)),
            embed_backend_id=obj.get("embed_backend_id", "hashed"),
            score_backend_id=obj.get("score_backend_id", "lexical"),
        )


@dataclass(frozen=True)
class Snippet:
    """A retrieved source sentence plus its surviving neighbor window."""

    center_index: int
    offsets: tuple[int, ...]
    text: str
    similarity: float


def retrieve_top_k(
    summary_vec: np.ndarray,
    doc_vecs: Sequence[np.ndarray],
    k: int,
) -> list[tuple[int, float]]:
    """Indices and similarities of the min(k, I) most similar source sentences.

    Sorted by descending cosine similarity; exact ties resolve to the lower
    document index.
    """
    if len(doc_vecs) == 0:
        raise InputError("cannot retrieve from an empty document")
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    sims = [cosine(summary_vec, dv) for dv in doc_vecs]
    order = sorted(range(len(sims)), key=lambda i: (-sims[i], i))
    return [(i, sims[i]) for i in order[: min(k, len(sims))]]


def build_snippet(
    document: Document,
    center: int,
    neighbor_offsets: Sequence[int],
    *,
    similarity: float = 0.0,
) -> Snippet:
    """Concatenate the sentences at ``center + offset`` that fall inside the
    document, in document order, separated by single spaces."""
    count = len(document.sentences)
    if not 0 <= center < count:
        raise InputError(f"snippet center {center} out of range for {count} sentences")
    kept = [o for o in sorted(neighbor_offsets) if 0 <= center + o < count]
    text = " ".join(document.sentences[center + o].text for o in kept)
    return Snippet(center_index=center, offsets=tuple(kept), text=text, similarity=similarity)
