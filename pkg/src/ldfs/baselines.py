"""Comparator metrics: ROUGE-1/2/L and a greedy sentence-embedding match.

ROUGE here is the plain F1 variant over the shared tokenizer's output — no
stemming, no stopword removal — computed over whole texts. Reports label the
variant ("rouge2-f1-nostem") so numbers are never silently mixed with other
ROUGE configurations.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from . import segmenter
from .embedding import EmbeddingBackend, cosine, embed
from .errors import ConfigError, InputError


@dataclass(frozen=True)
class PrfScore:
    precision: float
    recall: float
    f1: float


def _prf(overlap: float, candidate_total: int, reference_total: int) -> PrfScore:
    p = overlap / candidate_total if candidate_total else 0.0
    r = overlap / reference_total if reference_total else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return PrfScore(precision=p, recall=r, f1=f1)


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: str, reference: str, n: int) -> PrfScore:
    """Clipped n-gram overlap precision/recall/F1."""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    cand = _ngrams(segmenter.tokenize(candidate), n)
    ref = _ngrams(segmenter.tokenize(reference), n)
    overlap = sum(min(count, ref[gram]) for gram, count in cand.items())
    return _prf(overlap, sum(cand.values()), sum(ref.values()))


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for token in a:
        curr = [0] * (len(b) + 1)
        for j, other in enumerate(b, start=1):
            if token == other:
                curr[j] = prev[j - 1] + 1
            else:
                curr[j] = max(prev[j], curr[j - 1])
        prev = curr
    return prev[-1]


def rouge_l(candidate: str, reference: str) -> PrfScore:
    """Longest-common-subsequence precision/recall/F1 over whole texts."""
    cand = segmenter.tokenize(candidate)
    ref = segmenter.tokenize(reference)
    lcs = _lcs_length(cand, ref)
    return _prf(lcs, len(cand), len(ref))


def greedy_embedding_fscore(candidate: str, reference: str, embed_backend: EmbeddingBackend) -> float:
    """Harmonic mean of greedy sentence-level max-similarity matches.

    Recall side: each reference sentence matches its most similar candidate
    sentence; precision side symmetric; both averaged, then combined (0 when
    the sum of the two sides is <= 0).
    """
    cand_sentences = segmenter.split_sentences(candidate)
    ref_sentences = segmenter.split_sentences(reference)
    if not cand_sentences or not ref_sentences:
        raise InputError("both texts must segment into at least one sentence")
    cand_vecs = embed(embed_backend, [s.text for s in cand_sentences])
    ref_vecs = embed(embed_backend, [s.text for s in ref_sentences])
    recall = math.fsum(max(cosine(rv, cv) for cv in cand_vecs) for rv in ref_vecs) / len(ref_vecs)
    precision = math.fsum(max(cosine(cv, rv) for rv in ref_vecs) for cv in cand_vecs) / len(cand_vecs)
    if precision + recall <= 0.0:
        return 0.0
    return min(1.0, max(-1.0, 2 * precision * recall / (precision + recall)))
