"""Model wrappers: mean-token sentence embeddings and conditional target
log-likelihood under an encoder-decoder LM.

Everything runs in eval mode with no sampling, so identical requests return
identical results within a server process. A lock serializes forward passes;
request handling stays concurrent at the HTTP layer.
"""

from __future__ import annotations

import threading

import torch
from transformers import AutoModel, AutoModelForSeq2SeqLM, AutoTokenizer


def _position_limit(model_config, fallback: int = 512) -> int:
    for attr in ("max_position_embeddings", "n_positions"):
        value = getattr(model_config, attr, None)
        if isinstance(value, int) and value > 0:
            return value
    return fallback


def _chunks(items, size):
    for start in range(0, len(items), size):
        yield items[start : start + size]


class SentenceEmbedder:
    """Mean pooling over the encoder's token states, L2-normalized.

    Texts with no tokens map to the zero vector. Inputs longer than the token
    limit are truncated and flagged.
    """

    def __init__(self, model_id: str, device: str = "cpu", max_tokens: int | None = None,
                 infer_batch_size: int = 32):
        self.backend_id = model_id
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModel.from_pretrained(model_id).to(device).eval()
        self.device = device
        self.max_tokens = max_tokens or _position_limit(self.model.config)
        self.dim = int(self.model.config.hidden_size)
        self.infer_batch_size = infer_batch_size
        self._lock = threading.Lock()

    def _token_count(self, text: str) -> int:
        return len(self.tokenizer(text, truncation=False)["input_ids"])

    def encode(self, texts: list[str]) -> tuple[list[list[float]], list[bool]]:
        vectors: list[list[float] | None] = [None] * len(texts)
        truncated = [False] * len(texts)
        live: list[int] = []
        for i, text in enumerate(texts):
            count = self._token_count(text)
            if count == 0:
                vectors[i] = [0.0] * self.dim
            else:
                truncated[i] = count > self.max_tokens
                live.append(i)
        with self._lock, torch.no_grad():
            for chunk in _chunks(live, self.infer_batch_size):
                enc = self.tokenizer(
                    [texts[i] for i in chunk],
                    padding=True,
                    truncation=True,
                    max_length=self.max_tokens,
                    return_tensors="pt",
                ).to(self.device)
                hidden = self.model(**enc).last_hidden_state
                mask = enc["attention_mask"].unsqueeze(-1).to(hidden.dtype)
                pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1.0)
                norms = pooled.norm(dim=-1, keepdim=True).clamp(min=1e-12)
                normalized = pooled / norms
                for i, row in zip(chunk, normalized):
                    vectors[i] = [float(v) for v in row]
        return [v for v in vectors if v is not None], truncated


class ConditionalScorer:
    """Log-likelihood of a target sequence given a context sequence.

    The declared variant is either the mean or the sum of target-token log
    probabilities under teacher forcing. Contexts and targets beyond the
    token limit are truncated and flagged.
    """

    def __init__(self, model_id: str, device: str = "cpu", variant: str = "mean",
                 max_tokens: int | None = None, infer_batch_size: int = 32):
        self.backend_id = model_id
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModelForSeq2SeqLM.from_pretrained(model_id).to(device).eval()
        self.device = device
        self.variant = variant
        self.max_tokens = max_tokens or _position_limit(self.model.config)
        self.infer_batch_size = infer_batch_size
        self._lock = threading.Lock()

    def _too_long(self, text: str) -> bool:
        return len(self.tokenizer(text, truncation=False)["input_ids"]) > self.max_tokens

    def score(self, pairs: list[tuple[str, str]]) -> tuple[list[float], list[bool]]:
        """``pairs`` holds (target, context); returns scores and truncation flags."""
        scores: list[float] = []
        truncated = [self._too_long(t) or self._too_long(c) for t, c in pairs]
        with self._lock, torch.no_grad():
            for chunk in _chunks(list(pairs), self.infer_batch_size):
                scores.extend(self._score_chunk(chunk))
        return scores, truncated

    def _score_chunk(self, chunk: list[tuple[str, str]]) -> list[float]:
        targets = [t for t, _ in chunk]
        contexts = [c for _, c in chunk]
        enc = self.tokenizer(
            contexts, padding=True, truncation=True, max_length=self.max_tokens,
            return_tensors="pt",
        ).to(self.device)
        label_enc = self.tokenizer(
            targets, padding=True, truncation=True, max_length=self.max_tokens,
            return_tensors="pt",
        ).to(self.device)
        labels = label_enc["input_ids"].masked_fill(label_enc["attention_mask"] == 0, -100)
        if labels.shape[1] == 0:  # every target empty
            return [0.0] * len(chunk)
        logits = self.model(
            input_ids=enc["input_ids"], attention_mask=enc["attention_mask"], labels=labels
        ).logits
        log_probs = torch.log_softmax(logits.float(), dim=-1)
        safe_labels = labels.clamp(min=0)
        token_scores = log_probs.gather(-1, safe_labels.unsqueeze(-1)).squeeze(-1)
        valid = (labels != -100).to(token_scores.dtype)
        sums = (token_scores * valid).sum(dim=1)
        counts = valid.sum(dim=1)
        out = []
        for total, count in zip(sums, counts):
            if count == 0:
                out.append(0.0)
            elif self.variant == "mean":
                out.append(float(total / count))
            else:
                out.append(float(total))
        return out
