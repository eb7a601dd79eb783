"""Hidden-state extraction into the artifact exchange formats.

Produces, for a chosen encoder layer, one vector per corpus word: the
arithmetic mean of the word's subword vectors. Output artifacts follow
the analysis service's ingestion grammar:

  corpus.txt       retained sentences, densely re-indexed
  tokens.jsonl     {occurrence_id, sentence_id, position, surface} lines
  embeddings.f32   little-endian float32 row-major buffer
  embeddings.json  {n, d, layer, model_name, checksum}

Sentences whose subword count exceeds the model's sequence limit are
skipped and logged; all emitted artifacts stay mutually aligned over
the retained sentences.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np
import torch

from .config import ExtractionConfig
from .corpus import Sentence, read_corpus, serialize_corpus
from .errors import CorpusError
from .model import (
    encode_words,
    load_classifier,
    model_depth,
    sequence_limit,
    word_groups,
)

log = logging.getLogger(__name__)

EMBEDDING_DTYPE = np.dtype("<f4")


@dataclass
class ExtractionResult:
    sentences: List[Sentence]          # retained, densely re-indexed
    skipped: List[Tuple[int, int]]     # (original sentence index, subword count)
    manifest: List[dict]
    matrix: np.ndarray                 # (total words, hidden size) float32


def split_by_limit(
    tokenizer, sentences: Sequence[Sentence], limit: int
) -> Tuple[List[Sentence], List[Tuple[int, int]]]:
    """Partition sentences into (retained, skipped) by subword length."""
    retained: List[Sentence] = []
    skipped: List[Tuple[int, int]] = []
    for i, s in enumerate(sentences):
        n_tokens = encode_words(tokenizer, s.words)["input_ids"].shape[1]
        if n_tokens > limit:
            skipped.append((i, n_tokens))
            log.warning(
                "sentence %d exceeds model limit (%d subwords > %d), skipped",
                i,
                n_tokens,
                limit,
            )
        else:
            retained.append(s)
    return retained, skipped


def extract_embeddings(
    config: ExtractionConfig, sentences: Sequence[Sentence], model, tokenizer
) -> ExtractionResult:
    config.validate_against(model_depth(model))
    limit = sequence_limit(model, tokenizer)
    retained, skipped = split_by_limit(tokenizer, sentences, limit)
    if not retained:
        raise CorpusError("no sentence fits the model sequence limit")

    manifest: List[dict] = []
    vectors: List[torch.Tensor] = []
    hidden_index = config.layer + 1  # hidden_states[0] is the embedding output
    occurrence_id = 0
    for start in range(0, len(retained), config.batch_size):
        batch = retained[start : start + config.batch_size]
        enc = tokenizer(
            [s.words for s in batch],
            is_split_into_words=True,
            padding=True,
            return_tensors="pt",
        ).to(config.device)
        with torch.no_grad():
            hidden = model(**enc, output_hidden_states=True).hidden_states[hidden_index]
        for b, sentence in enumerate(batch):
            groups = word_groups(enc.word_ids(b), len(sentence.words))
            sid = start + b
            for pos, (word, group) in enumerate(zip(sentence.words, groups)):
                if not group:
                    raise CorpusError(
                        "word lost by tokenization", sentence_id=sid, position=pos
                    )
                vectors.append(hidden[b, group].mean(dim=0).cpu())
                manifest.append(
                    {
                        "occurrence_id": occurrence_id,
                        "sentence_id": sid,
                        "position": pos,
                        "surface": word,
                    }
                )
                occurrence_id += 1
    matrix = torch.stack(vectors).numpy().astype(EMBEDDING_DTYPE)
    return ExtractionResult(
        sentences=list(retained), skipped=skipped, manifest=manifest, matrix=matrix
    )


def manifest_bytes(manifest: Sequence[dict]) -> bytes:
    lines = [json.dumps(row, ensure_ascii=False) for row in manifest]
    return ("\n".join(lines) + "\n").encode("utf-8")


def embeddings_meta(matrix: np.ndarray, layer: int, model_name: str) -> dict:
    buf = np.ascontiguousarray(matrix, dtype=EMBEDDING_DTYPE).tobytes()
    return {
        "n": int(matrix.shape[0]),
        "d": int(matrix.shape[1]),
        "layer": layer,
        "model_name": model_name,
        "checksum": hashlib.sha256(buf).hexdigest(),
    }


def write_extraction(result: ExtractionResult, out_dir, config: ExtractionConfig) -> dict:
    """Write the artifact files; returns the embeddings meta."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "corpus.txt").write_bytes(serialize_corpus(result.sentences))
    (out / "tokens.jsonl").write_bytes(manifest_bytes(result.manifest))
    buf = np.ascontiguousarray(result.matrix, dtype=EMBEDDING_DTYPE).tobytes()
    (out / "embeddings.f32").write_bytes(buf)
    meta = embeddings_meta(result.matrix, config.layer, config.model)
    (out / "embeddings.json").write_text(json.dumps(meta, indent=2) + "\n")
    return meta


def run_extraction(config: ExtractionConfig, corpus_path, out_dir) -> ExtractionResult:
    """Load the model, extract, and write artifacts. CLI entry point."""
    config.validate()
    model, tokenizer = load_classifier(config.model, config.device)
    sentences = read_corpus(Path(corpus_path).read_bytes())
    result = extract_embeddings(config, sentences, model, tokenizer)
    write_extraction(result, out_dir, config)
    return result
