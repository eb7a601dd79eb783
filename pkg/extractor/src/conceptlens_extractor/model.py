"""Classifier loading and word-level encoding helpers.

Words are whitespace tokens from the corpus; the tokenizer may split
each into several subword pieces. Everything downstream needs the
word -> subword index mapping, so encoding always goes through
``is_split_into_words`` and ``word_ids``.
"""

from __future__ import annotations

import logging
from typing import List, Optional, Sequence, Tuple

import torch
import transformers
from transformers import AutoModelForSequenceClassification, AutoTokenizer

from .errors import ConfigError

log = logging.getLogger(__name__)

transformers.logging.set_verbosity_error()
if hasattr(transformers.logging, "disable_progress_bar"):
    transformers.logging.disable_progress_bar()


def load_classifier(model_id: str, device: str = "cpu"):
    """Load a sequence classifier and its tokenizer from a name or path."""
    try:
        tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = AutoModelForSequenceClassification.from_pretrained(model_id)
    except (OSError, ValueError) as exc:
        raise ConfigError("cannot load model", model=model_id, cause=str(exc)) from None
    model.to(device)
    model.eval()
    return model, tokenizer


def model_depth(model) -> int:
    depth = getattr(model.config, "num_hidden_layers", None)
    if depth is None:
        raise ConfigError("model config does not declare encoder depth")
    return int(depth)


def sequence_limit(model, tokenizer) -> int:
    """Longest subword sequence the model accepts."""
    limit = int(getattr(model.config, "max_position_embeddings", 0) or 0)
    tok_limit = int(getattr(tokenizer, "model_max_length", 0) or 0)
    # Tokenizers use a huge sentinel when unconfigured; ignore it.
    if 0 < tok_limit < int(1e9):
        limit = min(limit, tok_limit) if limit else tok_limit
    if limit <= 0:
        raise ConfigError("cannot determine model sequence limit")
    return limit


def encode_words(tokenizer, words: Sequence[str]):
    """Encode one whitespace-split sentence, keeping subword alignment."""
    return tokenizer(
        [list(words)],
        is_split_into_words=True,
        return_tensors="pt",
    )


def word_groups(word_ids: Sequence[Optional[int]], n_words: int) -> List[List[int]]:
    """Map each word to the token indices of its subword pieces.

    Special tokens carry a ``None`` word id and belong to no group.
    """
    groups: List[List[int]] = [[] for _ in range(n_words)]
    for token_idx, wid in enumerate(word_ids):
        if wid is not None:
            groups[wid].append(token_idx)
    return groups


def class_names(model) -> List[str]:
    id2label = getattr(model.config, "id2label", None) or {}
    n = int(getattr(model.config, "num_labels", len(id2label)) or len(id2label))
    # Config round-trips through JSON can leave the keys as strings.
    return [str(id2label.get(i, id2label.get(str(i), f"LABEL_{i}"))) for i in range(n)]


def predict(model, enc) -> Tuple[int, torch.Tensor]:
    """Predicted class index and softmax probabilities for one sentence."""
    with torch.no_grad():
        logits = model(**enc).logits[0]
    probs = torch.softmax(logits, dim=-1)
    return int(logits.argmax()), probs
