"""Shared fixture builders and independent oracles used across the suite."""

from __future__ import annotations

import math

import pytest

from ldfs.corpus import Document, SummaryRecord
from ldfs.embedding import hashed_bucket
from ldfs.segmenter import tokenize

FILLER = "Alpha filler words repeat again and again here."  # 8 tokens
N_FILLERS = 130  # 1040 tokens, past the 1024-token truncation boundary

SUMMARY_SENTENCES = [
    "Magnesium ribbon burns quickly alpha.",
    "Copper sulfate turns blue alpha.",
    "Quartz crystal vibrates steadily alpha.",
]
EVIDENCE_SENTENCES = [
    "Magnesium ribbon burns quickly when heated alpha today.",
    "Copper sulfate slowly turns deep blue alpha overnight.",
    "Quartz crystal vibrates very steadily alpha indeed.",
]


def collision_free_padding(n: int, forbidden_tokens: set[str]) -> list[str]:
    """Padding sentences whose token buckets avoid every forbidden bucket."""
    forbidden = {hashed_bucket(t) for t in forbidden_tokens}
    tokens: list[str] = []
    i = 0
    while len(tokens) < 3 * n:
        candidate = f"pad{i}"
        i += 1
        if hashed_bucket(candidate) not in forbidden:
            tokens.append(candidate)
    sentences = []
    for j in range(n):
        a, b, c = tokens[3 * j : 3 * j + 3]
        sentences.append(f"{a.capitalize()} {b} {c}.")
    return sentences


@pytest.fixture(scope="session")
def evidence_fixture():
    """Documents where the summary's evidence sits past the truncation boundary.

    Variants: evidence at the end, evidence removed, evidence at the front,
    and evidence at the end plus 100 padding sentences whose hashed buckets
    are verified disjoint from every summary-sentence token bucket.
    """
    summary_tokens = {t for s in SUMMARY_SENTENCES for t in tokenize(s)}
    padding = collision_free_padding(100, summary_tokens)
    # direct index inspection: no padding token may share a bucket with the summary
    pad_tokens = {t for s in padding for t in tokenize(s)}
    assert not ({hashed_bucket(t) for t in pad_tokens} & {hashed_bucket(t) for t in summary_tokens})

    fillers = [FILLER] * N_FILLERS
    tail_guard = [FILLER, FILLER]
    variants = {
        "evidence-end": fillers + EVIDENCE_SENTENCES + tail_guard,
        "evidence-none": fillers + tail_guard,
        "evidence-front": EVIDENCE_SENTENCES + fillers + tail_guard,
        "evidence-end-padded": fillers + EVIDENCE_SENTENCES + tail_guard + padding,
    }
    documents = {name: Document.from_text(name, " ".join(sents)) for name, sents in variants.items()}
    summaries = {
        name: SummaryRecord.from_text(name, "sysA", " ".join(SUMMARY_SENTENCES)) for name in variants
    }
    for name, doc in documents.items():
        assert len(doc.sentences) == len(variants[name])
    return documents, summaries


def brute_force_summary_score(document, summary, neighbor_offsets, score_fn) -> float:
    """Independent max/mean evaluation: every source index becomes a snippet
    center for every summary sentence; no retrieval, no shared aggregation code."""
    count = len(document.sentences)
    maxima = []
    for sentence in summary.sentences:
        best = None
        for center in range(count):
            kept = [o for o in sorted(neighbor_offsets) if 0 <= center + o < count]
            snippet_text = " ".join(document.sentences[center + o].text for o in kept)
            value = score_fn(sentence.text, snippet_text)
            if best is None or value > best:
                best = value
        maxima.append(best)
    return sum(maxima) / len(maxima)


def brute_kendall_tau_b(x, y) -> float:
    n = len(x)
    concordant = discordant = tied_x = tied_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            a = (x[i] > x[j]) - (x[i] < x[j])
            b = (y[i] > y[j]) - (y[i] < y[j])
            if a == 0 and b == 0:
                tied_x += 1
                tied_y += 1
            elif a == 0:
                tied_x += 1
            elif b == 0:
                tied_y += 1
            elif a == b:
                concordant += 1
            else:
                discordant += 1
    n0 = n * (n - 1) / 2
    return (concordant - discordant) / math.sqrt((n0 - tied_x) * (n0 - tied_y))


def brute_pearson(x, y) -> float:
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    num = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    den = math.sqrt(math.fsum((a - mx) ** 2 for a in x) * math.fsum((b - my) ** 2 for b in y))
    return num / den


def brute_ranks(values) -> list[float]:
    return [
        sum(1 for other in values if other < v) + (sum(1 for other in values if other == v) + 1) / 2
        for v in values
    ]


def brute_spearman(x, y) -> float:
    return brute_pearson(brute_ranks(x), brute_ranks(y))
