"""Server configuration."""

from __future__ import annotations

from dataclasses import dataclass

# Published checkpoints the reference deployment wraps. Any local path or hub
# id that AutoModel/AutoModelForSeq2SeqLM can resolve works, including the
# tiny offline models from `ldfs_server.tiny`.
DEFAULT_EMBED_MODEL = "sentence-transformers/bert-base-nli-mean-tokens"
DEFAULT_SCORE_MODEL = "facebook/bart-large"


@dataclass
class ServerConfig:
    embed_model: str = DEFAULT_EMBED_MODEL
    score_model: str = DEFAULT_SCORE_MODEL
    device: str = "cpu"
    max_batch_size: int = 256
    score_variant: str = "mean"  # "mean" or "sum" log-likelihood
    embed_max_tokens: int | None = None  # None: use the model's position limit
    score_max_tokens: int | None = None
    infer_batch_size: int = 32

    def __post_init__(self):
        if self.score_variant not in ("mean", "sum"):
            raise ValueError(f"score_variant must be 'mean' or 'sum', got {self.score_variant!r}")
        if self.max_batch_size < 1:
            raise ValueError("max_batch_size must be >= 1")
