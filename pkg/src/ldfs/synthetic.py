"""Seeded synthetic corpora for benchmarks, fixtures, and demos.

Generated sentences start with a capitalized token and end with a period, so
re-segmenting a generated text reproduces the generated sentences exactly.
Summary sentences reuse words from a randomly chosen source sentence plus
some noise, which gives non-trivial similarity structure to retrieve against.
"""

from __future__ import annotations

import random

from .corpus import AnnotationRecord, AnnotationSet, Document, SummaryRecord

DEFAULT_SEED = 42


def _vocabulary(size: int) -> list[str]:
    return [f"w{i}" for i in range(size)]


def _sentence(rng: random.Random, vocab: list[str], min_words: int = 5, max_words: int = 12) -> str:
    words = [rng.choice(vocab) for _ in range(rng.randint(min_words, max_words))]
    return words[0].capitalize() + " " + " ".join(words[1:]) + "."


def _summary_sentence(rng: random.Random, vocab: list[str], doc_sentence: str) -> str:
    source_words = doc_sentence.rstrip(".").lower().split()
    keep = max(2, int(len(source_words) * rng.uniform(0.4, 0.9)))
    words = rng.sample(source_words, min(keep, len(source_words)))
    words += [rng.choice(vocab) for _ in range(rng.randint(0, 2))]
    rng.shuffle(words)
    return words[0].capitalize() + " " + " ".join(words[1:]) + "."


def synthetic_corpus(
    n_docs: int,
    doc_sentences: int,
    summary_sentences: int,
    *,
    seed: int = DEFAULT_SEED,
    summaries_per_doc: int = 1,
    vocab_size: int = 400,
) -> tuple[list[Document], list[SummaryRecord]]:
    rng = random.Random(seed)
    vocab = _vocabulary(vocab_size)
    documents = []
    summaries = []
    for d in range(n_docs):
        doc_sents = [_sentence(rng, vocab) for _ in range(doc_sentences)]
        doc = Document.from_text(f"doc{d:03d}", " ".join(doc_sents))
        assert len(doc.sentences) == doc_sentences
        documents.append(doc)
        for s in range(summaries_per_doc):
            summ_sents = [
                _summary_sentence(rng, vocab, rng.choice(doc_sents)) for _ in range(summary_sentences)
            ]
            summary = SummaryRecord.from_text(doc.doc_id, f"sys{s}", " ".join(summ_sents))
            assert len(summary.sentences) == summary_sentences
            summaries.append(summary)
    return documents, summaries


def synthetic_annotations(
    summaries: list[SummaryRecord],
    *,
    n_annotators: int = 3,
    sentences_per_summary: int = 3,
    seed: int = DEFAULT_SEED,
) -> AnnotationSet:
    """Random binary entailment labels over sampled summary sentences."""
    rng = random.Random(seed)
    records = []
    for summary in summaries:
        count = min(sentences_per_summary, len(summary.sentences))
        sampled = sorted(rng.sample(range(len(summary.sentences)), count))
        for a in range(n_annotators):
            for idx in sampled:
                records.append(
                    AnnotationRecord(
                        doc_id=summary.doc_id,
                        system_id=summary.system_id,
                        annotator_id=f"ann{a}",
                        sentence_index=idx,
                        label=rng.randint(0, 1),
                    )
                )
    return AnnotationSet(records=tuple(records))
