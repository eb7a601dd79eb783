"""Bundled toy classifiers for tests and offline walkthroughs.

Two models, both deterministic given a seed:

  * a 2-layer BERT sequence classifier over a small WordPiece vocab,
    saved in standard checkpoint layout so the CLI loads it like any
    hub model;
  * a classifier whose logits are exactly linear in the input
    embeddings, for which integrated gradients admits a closed form.

The toy tokenizer adds no special tokens and most vocab words are
single pieces, so on this fixture a sentence's word scores sum to the
full attribution mass and the completeness identity is visible at word
level. The pieces ##ing/##ed/##s exist to exercise subword splitting.
"""

from __future__ import annotations

import random
from pathlib import Path
from types import SimpleNamespace
from typing import List, Tuple

import torch
from tokenizers import Tokenizer
from tokenizers.models import WordPiece
from tokenizers.pre_tokenizers import WhitespaceSplit
from transformers import BertConfig, BertForSequenceClassification, PreTrainedTokenizerFast

TOY_WORDS = [
    "the", "a", "cat", "dog", "bird", "sat", "ran", "flew", "on", "under",
    "mat", "tree", "sun", "rain", "big", "small", "red", "blue", "happy",
    "sad", "very", "quite", "play", "walk", "jump",
]
TOY_PIECES = ["##ing", "##ed", "##s"]
TOY_LABELS = {0: "negative", 1: "positive"}
MAX_POSITIONS = 64


def build_toy_tokenizer() -> PreTrainedTokenizerFast:
    vocab = {"[PAD]": 0, "[UNK]": 1}
    for piece in TOY_WORDS + TOY_PIECES:
        vocab[piece] = len(vocab)
    tok = Tokenizer(WordPiece(vocab, unk_token="[UNK]"))
    tok.pre_tokenizer = WhitespaceSplit()
    return PreTrainedTokenizerFast(
        tokenizer_object=tok,
        pad_token="[PAD]",
        unk_token="[UNK]",
        model_max_length=MAX_POSITIONS,
    )


def build_toy_classifier(seed: int = 7) -> Tuple[BertForSequenceClassification, PreTrainedTokenizerFast]:
    tokenizer = build_toy_tokenizer()
    config = BertConfig(
        vocab_size=len(tokenizer.get_vocab()),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=MAX_POSITIONS,
        num_labels=len(TOY_LABELS),
        id2label=dict(TOY_LABELS),
        label2id={v: k for k, v in TOY_LABELS.items()},
        pad_token_id=tokenizer.pad_token_id,
    )
    torch.manual_seed(seed)
    model = BertForSequenceClassification(config)
    model.eval()
    return model, tokenizer


def save_toy_classifier(target, seed: int = 7) -> Path:
    """Materialize the toy checkpoint so --model can point at a directory."""
    target = Path(target)
    model, tokenizer = build_toy_classifier(seed)
    model.save_pretrained(target)
    tokenizer.save_pretrained(target)
    return target


class LinearLogitModel(torch.nn.Module):
    """logit_c = bias_c + sum over tokens of weight_c . x_t, linear in x.

    Linearity makes the integrated-gradients path integral exact at any
    step count: each token's score must equal weight_pred . x_t.
    """

    def __init__(self, vocab_size: int, hidden_size: int = 16, seed: int = 5):
        super().__init__()
        torch.manual_seed(seed)
        # double precision so the closed form holds to well under 1e-6
        self.embedding = torch.nn.Embedding(vocab_size, hidden_size, dtype=torch.float64)
        self.weight = torch.nn.Parameter(torch.randn(len(TOY_LABELS), hidden_size, dtype=torch.float64))
        self.bias = torch.nn.Parameter(torch.randn(len(TOY_LABELS), dtype=torch.float64))
        self.config = SimpleNamespace(
            num_labels=len(TOY_LABELS),
            id2label=dict(TOY_LABELS),
            num_hidden_layers=1,
            hidden_size=hidden_size,
            max_position_embeddings=MAX_POSITIONS,
            pad_token_id=0,
        )

    def get_input_embeddings(self):
        return self.embedding

    def forward(self, input_ids=None, attention_mask=None, inputs_embeds=None, **_):
        if inputs_embeds is None:
            inputs_embeds = self.embedding(input_ids)
        if attention_mask is not None:
            inputs_embeds = inputs_embeds * attention_mask.unsqueeze(-1).to(inputs_embeds.dtype)
        pooled = inputs_embeds.sum(dim=1)
        return SimpleNamespace(logits=pooled @ self.weight.T + self.bias)


def build_linear_classifier(seed: int = 5) -> Tuple[LinearLogitModel, PreTrainedTokenizerFast]:
    tokenizer = build_toy_tokenizer()
    model = LinearLogitModel(len(tokenizer.get_vocab()), seed=seed)
    model.eval()
    return model, tokenizer


def toy_corpus(n_sentences: int = 12, seed: int = 1, labeled: bool = True) -> bytes:
    """Deterministic corpus over the toy vocab, one sentence per line."""
    rng = random.Random(seed)
    splittable = ["playing", "walked", "jumps", "playings"]
    lines: List[str] = []
    for i in range(n_sentences):
        words = [rng.choice(TOY_WORDS) for _ in range(rng.randint(4, 8))]
        if i % 3 == 0:
            words[rng.randrange(len(words))] = rng.choice(splittable)
        line = " ".join(words)
        if labeled:
            line += "\t" + ("positive" if rng.random() < 0.5 else "negative")
        lines.append(line)
    return ("\n".join(lines) + "\n").encode("utf-8")
