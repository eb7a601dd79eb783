"""Integrated-gradients attributions for the predicted class.

For a sentence with embedded input x and baseline x', coordinate i gets

    (x_i - x'_i) * (1/m) * sum_{j=1..m} dF/dx_i at x' + (j/m)(x - x')

where F is the pre-softmax logit of the predicted class. Coordinate
attributions are summed per subword token; a word's score is the mean
over its subword tokens. The recorded convergence_delta is the gap
|sum of all token scores - (F(x) - F(x'))| taken before the subword
aggregation, so it measures path-integral approximation error and
shrinks as m grows regardless of how words split.

Gradients are taken through the float32 model but accumulated in
float64, which keeps the linear-model case exact.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence

import torch

from .config import ExtractionConfig
from .corpus import Sentence, read_corpus
from .errors import ConfigError, CorpusError, NumericError
from .extract import split_by_limit
from .model import class_names, encode_words, load_classifier, sequence_limit, word_groups

log = logging.getLogger(__name__)


@dataclass
class IGResult:
    word_scores: List[float]
    predicted_index: int
    probabilities: List[float]
    convergence_delta: float


def _baseline_for(config: ExtractionConfig, x: torch.Tensor, ids, model) -> torch.Tensor:
    if config.baseline == "zero-embedding":
        return torch.zeros_like(x)
    if config.baseline == "pad-token":
        pad_id = getattr(model.config, "pad_token_id", None)
        if pad_id is None:
            raise ConfigError("model declares no pad token for the pad-token baseline")
        return model.get_input_embeddings()(torch.full_like(ids, int(pad_id))).detach()
    raise ConfigError("unknown baseline strategy", baseline=config.baseline)


def integrated_gradients(
    config: ExtractionConfig, words: Sequence[str], model, tokenizer, sentence_id: int = 0
) -> IGResult:
    """Attribute one sentence. ``sentence_id`` only labels errors."""
    config.validate()
    enc = encode_words(tokenizer, words).to(config.device)
    ids = enc["input_ids"]
    mask = enc.get("attention_mask")

    def logits_at(z: torch.Tensor) -> torch.Tensor:
        return model(inputs_embeds=z, attention_mask=mask.expand(z.shape[0], -1) if mask is not None else None).logits

    x = model.get_input_embeddings()(ids).detach()
    baseline = _baseline_for(config, x, ids, model)
    with torch.no_grad():
        logits = logits_at(x)[0]
        pred = int(logits.argmax())
        probabilities = torch.softmax(logits, dim=-1).tolist()
        fx = float(logits[pred])
        fxp = float(logits_at(baseline)[0, pred])
    if not (math.isfinite(fx) and math.isfinite(fxp)):
        raise NumericError("non-finite model output", sentence_id=sentence_id)

    m = config.ig_steps
    delta_x = x - baseline
    grad_sum = torch.zeros_like(x[0], dtype=torch.float64)
    for start in range(1, m + 1, config.batch_size):
        steps = torch.arange(start, min(start + config.batch_size, m + 1), device=x.device)
        alphas = (steps.to(x.dtype) / m).view(-1, 1, 1)
        z = (baseline + alphas * delta_x).requires_grad_(True)
        target = logits_at(z)[:, pred].sum()
        (grad,) = torch.autograd.grad(target, z)
        if not torch.isfinite(grad).all():
            raise NumericError("non-finite gradient", sentence_id=sentence_id)
        # cast before the chunk reduction so accumulation stays in f64
        grad_sum += grad.double().sum(dim=0)
    token_scores = (delta_x[0].double() * (grad_sum / m)).sum(dim=-1)
    delta = abs(float(token_scores.sum()) - (fx - fxp))

    groups = word_groups(enc.word_ids(0), len(words))
    word_scores: List[float] = []
    for pos, group in enumerate(groups):
        if not group:
            raise CorpusError("word lost by tokenization", sentence_id=sentence_id, position=pos)
        word_scores.append(float(token_scores[group].mean()))
    if not all(math.isfinite(s) for s in word_scores):
        raise NumericError("non-finite token score", sentence_id=sentence_id)
    return IGResult(
        word_scores=word_scores,
        predicted_index=pred,
        probabilities=probabilities,
        convergence_delta=delta,
    )


def attribute_corpus(
    config: ExtractionConfig, sentences: Sequence[Sentence], model, tokenizer
) -> List[dict]:
    """Attribute every sentence that fits the model, in retained order.

    Applies the same length rule as embedding extraction so the emitted
    sentence ids line up with the extracted corpus.
    """
    limit = sequence_limit(model, tokenizer)
    retained, _ = split_by_limit(tokenizer, sentences, limit)
    names = class_names(model)
    records: List[dict] = []
    for sid, sentence in enumerate(retained):
        result = integrated_gradients(config, sentence.words, model, tokenizer, sentence_id=sid)
        probabilities: Dict[str, float] = {
            names[i]: float(p) for i, p in enumerate(result.probabilities)
        }
        records.append(
            {
                "sentence_id": sid,
                "predicted_class": names[result.predicted_index],
                "class_probabilities": probabilities,
                "token_scores": result.word_scores,
                "convergence_delta": result.convergence_delta,
            }
        )
    return records


def attributions_bytes(records: Sequence[dict]) -> bytes:
    lines = [json.dumps(r, ensure_ascii=False) for r in records]
    return ("\n".join(lines) + "\n").encode("utf-8")


def run_attribution(config: ExtractionConfig, corpus_path, out_dir) -> List[dict]:
    """Load the model, attribute the corpus, write attributions.jsonl."""
    config.validate()
    model, tokenizer = load_classifier(config.model, config.device)
    sentences = read_corpus(Path(corpus_path).read_bytes())
    records = attribute_corpus(config, sentences, model, tokenizer)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "attributions.jsonl").write_bytes(attributions_bytes(records))
    return records
