"""Reference-free factual-consistency scoring for long-document summarization.

Each summary sentence is checked against the most similar source snippets
(retrieved by sentence-embedding cosine similarity) instead of a truncated
document prefix, so evidence anywhere in an arbitrarily long source counts.
"""

from .corpus import AnnotationSet, Document, SummaryRecord, load_annotations, load_corpus
from .core import ScoreReport, score_corpus, score_summary
from .retrieval import MetricConfig

__version__ = "0.1.0"

__all__ = [
    "AnnotationSet",
    "Document",
    "MetricConfig",
    "ScoreReport",
    "SummaryRecord",
    "load_annotations",
    "load_corpus",
    "score_corpus",
    "score_summary",
    "__version__",
]
