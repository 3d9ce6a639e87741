"""Tiny offline models for development and the conformance suite.

Builds a word-level tokenizer plus randomly initialized (seeded) miniature
encoder and encoder-decoder checkpoints on disk, so the server can run
without network access or large downloads. Scores from these models are
meaningless but deterministic, which is all the protocol tests need.
"""

from __future__ import annotations

from pathlib import Path

import torch
from tokenizers import Tokenizer
from tokenizers.models import WordLevel
from tokenizers.pre_tokenizers import Whitespace
from transformers import (
    BartConfig,
    BartForConditionalGeneration,
    BertConfig,
    BertModel,
    PreTrainedTokenizerFast,
)

_WORDS = (
    "the a an and of to in on cat dog sat mat ran big small "
    "magnesium ribbon burns quickly copper sulfate turns blue quartz "
    "crystal vibrates steadily sodium metal reacts water alpha beta gamma "
    "summary document sentence evidence filler words repeat again here"
).split()

MAX_POSITIONS = 64


def _tokenizer() -> PreTrainedTokenizerFast:
    vocab = {"[PAD]": 0, "[UNK]": 1, "[CLS]": 2, "[SEP]": 3, "[BOS]": 4, "[EOS]": 5}
    for word in _WORDS:
        vocab.setdefault(word, len(vocab))
    for i in range(60):
        vocab.setdefault(f"w{i}", len(vocab))
    core = Tokenizer(WordLevel(vocab, unk_token="[UNK]"))
    core.pre_tokenizer = Whitespace()
    return PreTrainedTokenizerFast(
        tokenizer_object=core,
        pad_token="[PAD]",
        unk_token="[UNK]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        bos_token="[BOS]",
        eos_token="[EOS]",
    )


def build_tiny_models(target_dir: str | Path, seed: int = 0) -> tuple[str, str]:
    """Write tiny embed/score checkpoints under ``target_dir``; returns their paths."""
    target_dir = Path(target_dir)
    embed_dir = target_dir / "tiny-embed"
    score_dir = target_dir / "tiny-score"
    tokenizer = _tokenizer()
    vocab_size = tokenizer.vocab_size

    torch.manual_seed(seed)
    embedder = BertModel(
        BertConfig(
            vocab_size=vocab_size,
            hidden_size=32,
            num_hidden_layers=2,
            num_attention_heads=2,
            intermediate_size=64,
            max_position_embeddings=MAX_POSITIONS,
            pad_token_id=0,
        )
    )
    embedder.save_pretrained(embed_dir)
    tokenizer.save_pretrained(embed_dir)

    torch.manual_seed(seed + 1)
    scorer = BartForConditionalGeneration(
        BartConfig(
            vocab_size=vocab_size,
            d_model=32,
            encoder_layers=2,
            decoder_layers=2,
            encoder_attention_heads=2,
            decoder_attention_heads=2,
            encoder_ffn_dim=64,
            decoder_ffn_dim=64,
            max_position_embeddings=MAX_POSITIONS,
            pad_token_id=0,
            bos_token_id=4,
            eos_token_id=5,
            decoder_start_token_id=5,
            forced_eos_token_id=None,
        )
    )
    scorer.save_pretrained(score_dir)
    tokenizer.save_pretrained(score_dir)
    return str(embed_dir), str(score_dir)
