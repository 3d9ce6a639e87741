"""Data model and JSONL ingestion for documents, summaries, and annotations.

File formats (UTF-8, one JSON object per line, blank lines ignored):

* documents.jsonl    {"doc_id": str, "text": str}
* summaries.jsonl    {"doc_id": str, "system_id": str, "summary": str}
* annotations.jsonl  {"doc_id": str, "system_id": str, "annotator_id": str,
                      "sentence_index": int, "label": 0|1}

Unknown extra fields are preserved on the records and re-emitted by the save
functions, but otherwise ignored. Loaded objects are immutable and safe for
concurrent reads.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping, Sequence

from . import segmenter
from .errors import InputError
from .segmenter import Sentence


@dataclass(frozen=True, eq=True)
class Document:
    doc_id: str
    text: str
    sentences: tuple[Sentence, ...]
    extra: Mapping[str, Any] = field(default_factory=dict, compare=False)

    @classmethod
    def from_text(
        cls,
        doc_id: str,
        text: str,
        *,
        abbreviations: Sequence[str] = segmenter.DEFAULT_ABBREVIATIONS,
        extra: Mapping[str, Any] | None = None,
    ) -> "Document":
        if not doc_id:
            raise InputError("doc_id must be non-empty")
        if not text.strip():
            raise InputError(f"document {doc_id!r}: empty text after trimming")
        sentences = tuple(segmenter.split_sentences(text, abbreviations))
        if not sentences:
            raise InputError(f"document {doc_id!r}: no sentences after segmentation")
        _check_coverage(doc_id, text, sentences)
        return cls(doc_id=doc_id, text=text, sentences=sentences, extra=dict(extra or {}))


@dataclass(frozen=True, eq=True)
class SummaryRecord:
    doc_id: str
    system_id: str
    summary_text: str
    sentences: tuple[Sentence, ...]
    extra: Mapping[str, Any] = field(default_factory=dict, compare=False)

    @classmethod
    def from_text(
        cls,
        doc_id: str,
        system_id: str,
        summary_text: str,
        *,
        abbreviations: Sequence[str] = segmenter.DEFAULT_ABBREVIATIONS,
        extra: Mapping[str, Any] | None = None,
    ) -> "SummaryRecord":
        if not doc_id or not system_id:
            raise InputError("doc_id and system_id must be non-empty")
        if not summary_text.strip():
            raise InputError(f"summary ({doc_id!r}, {system_id!r}): empty text after trimming")
        sentences = tuple(segmenter.split_sentences(summary_text, abbreviations))
        if not sentences:
            raise InputError(f"summary ({doc_id!r}, {system_id!r}): no sentences after segmentation")
        return cls(
            doc_id=doc_id,
            system_id=system_id,
            summary_text=summary_text,
            sentences=sentences,
            extra=dict(extra or {}),
        )


@dataclass(frozen=True, eq=True)
class AnnotationRecord:
    doc_id: str
    system_id: str
    annotator_id: str
    sentence_index: int
    label: int
    extra: Mapping[str, Any] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class AnnotationSet:
    records: tuple[AnnotationRecord, ...]

    def __iter__(self) -> Iterator[AnnotationRecord]:
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def keys(self) -> list[tuple[str, str]]:
        """Distinct (doc_id, system_id) pairs in first-seen order."""
        seen: dict[tuple[str, str], None] = {}
        for r in self.records:
            seen.setdefault((r.doc_id, r.system_id), None)
        return list(seen)

    def annotator_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for r in self.records:
            seen.setdefault(r.annotator_id, None)
        return list(seen)


def _check_coverage(doc_id: str, text: str, sentences: tuple[Sentence, ...]) -> None:
    # The splitter must never drop or reorder alphanumeric content.
    original = "".join(segmenter._TOKEN_RE.findall(text))
    segmented = "".join("".join(segmenter._TOKEN_RE.findall(s.text)) for s in sentences)
    if original != segmented:
        raise InputError(f"document {doc_id!r}: segmentation altered alphanumeric content")


def _iter_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: file not found")
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: malformed JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise InputError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def _require(obj: dict, key: str, path: Path | str, lineno: int) -> Any:
    if key not in obj:
        raise InputError(f"{path}:{lineno}: missing field {key!r}")
    return obj[key]


def load_documents(
    path: str | Path,
    *,
    abbreviations: Sequence[str] = segmenter.DEFAULT_ABBREVIATIONS,
) -> list[Document]:
    documents: list[Document] = []
    seen: set[str] = set()
    for lineno, obj in _iter_jsonl(path):
        doc_id = _require(obj, "doc_id", path, lineno)
        text = _require(obj, "text", path, lineno)
        if not isinstance(doc_id, str) or not isinstance(text, str):
            raise InputError(f"{path}:{lineno}: doc_id and text must be strings")
        if doc_id in seen:
            raise InputError(f"{path}:{lineno}: duplicate doc_id {doc_id!r}")
        seen.add(doc_id)
        extra = {k: v for k, v in obj.items() if k not in ("doc_id", "text")}
        try:
            documents.append(Document.from_text(doc_id, text, abbreviations=abbreviations, extra=extra))
        except InputError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
    if not documents:
        raise InputError(f"{path}: no records")
    return documents


def load_summaries(
    path: str | Path,
    *,
    abbreviations: Sequence[str] = segmenter.DEFAULT_ABBREVIATIONS,
) -> list[SummaryRecord]:
    summaries: list[SummaryRecord] = []
    seen: set[tuple[str, str]] = set()
    for lineno, obj in _iter_jsonl(path):
        doc_id = _require(obj, "doc_id", path, lineno)
        system_id = _require(obj, "system_id", path, lineno)
        text = _require(obj, "summary", path, lineno)
        if not all(isinstance(v, str) for v in (doc_id, system_id, text)):
            raise InputError(f"{path}:{lineno}: doc_id, system_id and summary must be strings")
        key = (doc_id, system_id)
        if key in seen:
            raise InputError(f"{path}:{lineno}: duplicate (doc_id, system_id) {key!r}")
        seen.add(key)
        extra = {k: v for k, v in obj.items() if k not in ("doc_id", "system_id", "summary")}
        try:
            summaries.append(
                SummaryRecord.from_text(doc_id, system_id, text, abbreviations=abbreviations, extra=extra)
            )
        except InputError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
    if not summaries:
        raise InputError(f"{path}: no records")
    return summaries


def load_corpus(
    documents_path: str | Path,
    summaries_path: str | Path,
    *,
    abbreviations: Sequence[str] = segmenter.DEFAULT_ABBREVIATIONS,
) -> tuple[list[Document], list[SummaryRecord]]:
    """Load and cross-validate a document/summary corpus."""
    documents = load_documents(documents_path, abbreviations=abbreviations)
    summaries = load_summaries(summaries_path, abbreviations=abbreviations)
    known = {d.doc_id for d in documents}
    for summary in summaries:
        if summary.doc_id not in known:
            raise InputError(
                f"summary ({summary.doc_id!r}, {summary.system_id!r}) references a missing document"
            )
    return documents, summaries


def load_annotations(path: str | Path) -> AnnotationSet:
    records: list[AnnotationRecord] = []
    seen: set[tuple[str, str, str, int]] = set()
    for lineno, obj in _iter_jsonl(path):
        doc_id = _require(obj, "doc_id", path, lineno)
        system_id = _require(obj, "system_id", path, lineno)
        annotator_id = _require(obj, "annotator_id", path, lineno)
        sentence_index = _require(obj, "sentence_index", path, lineno)
        label = _require(obj, "label", path, lineno)
        if not all(isinstance(v, str) for v in (doc_id, system_id, annotator_id)):
            raise InputError(f"{path}:{lineno}: id fields must be strings")
        if not isinstance(sentence_index, int) or isinstance(sentence_index, bool) or sentence_index < 0:
            raise InputError(f"{path}:{lineno}: sentence_index must be a non-negative integer")
        if not isinstance(label, int) or isinstance(label, bool) or label not in (0, 1):
            raise InputError(f"{path}:{lineno}: label must be 0 or 1, got {label!r}")
        key = (doc_id, system_id, annotator_id, sentence_index)
        if key in seen:
            raise InputError(f"{path}:{lineno}: duplicate annotation tuple {key!r}")
        seen.add(key)
        extra = {
            k: v
            for k, v in obj.items()
            if k not in ("doc_id", "system_id", "annotator_id", "sentence_index", "label")
        }
        records.append(
            AnnotationRecord(
                doc_id=doc_id,
                system_id=system_id,
                annotator_id=annotator_id,
                sentence_index=sentence_index,
                label=label,
                extra=extra,
            )
        )
    if not records:
        raise InputError(f"{path}: no records")
    return AnnotationSet(records=tuple(records))


def summary_level_human_score(annotations: AnnotationSet, doc_id: str, system_id: str) -> float:
    """Mean over annotators of each annotator's mean binary label for a summary.

    Per-annotator means first, so annotators are weighted equally even when
    they labeled different numbers of sentences. ``math.fsum`` keeps the
    result independent of record order and annotator naming.
    """
    by_annotator: dict[str, list[int]] = defaultdict(list)
    for r in annotations:
        if r.doc_id == doc_id and r.system_id == system_id:
            by_annotator[r.annotator_id].append(r.label)
    if not by_annotator:
        raise InputError(f"no annotations for ({doc_id!r}, {system_id!r})")
    means = [math.fsum(labels) / len(labels) for labels in by_annotator.values()]
    return math.fsum(means) / len(means)


def check_annotation_indices(
    annotations: AnnotationSet,
    summaries: Iterable[SummaryRecord],
    *,
    strict: bool = True,
) -> list[str]:
    """Verify annotated sentence indices fit the segmented summaries.

    Returns warning strings in lenient mode; raises in strict mode. The
    annotators' tool may have segmented differently, hence the toggle.
    """
    lengths = {(s.doc_id, s.system_id): len(s.sentences) for s in summaries}
    problems = []
    for r in annotations:
        key = (r.doc_id, r.system_id)
        if key in lengths and r.sentence_index >= lengths[key]:
            problems.append(
                f"annotation for {key!r} indexes sentence {r.sentence_index} "
                f"but the summary has {lengths[key]} sentences"
            )
    if problems and strict:
        raise InputError("; ".join(problems))
    return problems


def _dump_line(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def save_documents(documents: Iterable[Document], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for d in documents:
            fh.write(_dump_line({"doc_id": d.doc_id, "text": d.text, **d.extra}) + "\n")


def save_summaries(summaries: Iterable[SummaryRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for s in summaries:
            fh.write(
                _dump_line(
                    {"doc_id": s.doc_id, "system_id": s.system_id, "summary": s.summary_text, **s.extra}
                )
                + "\n"
            )


def save_annotations(annotations: AnnotationSet, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for r in annotations:
            fh.write(
                _dump_line(
                    {
                        "doc_id": r.doc_id,
                        "system_id": r.system_id,
                        "annotator_id": r.annotator_id,
                        "sentence_index": r.sentence_index,
                        "label": r.label,
                        **r.extra,
                    }
                )
                + "\n"
            )
