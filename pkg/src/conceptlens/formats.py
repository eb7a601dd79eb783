"""Parsers and writers for the on-disk artifact exchange formats.

All ingestion surfaces accept raw bytes so the same code path serves
HTTP upload bodies and local files. Parsers validate eagerly and raise
the shared error types; they never return partially checked data.

Formats:
  corpus        UTF-8 text, one sentence per line, optional "<TAB>label".
  tokens        JSON lines {occurrence_id, sentence_id, position, surface}.
  embeddings    meta JSON {n, d, layer, model_name, checksum} plus a raw
                little-endian float32 row-major buffer of n*d values.
  tags          TSV "word<TAB>tag" lines, blank line between sentences,
                in corpus order.
  attributions  JSON lines matching AttributionRecord.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import (
    AlignmentMismatch,
    EncodingError,
    InvalidArtifact,
    NumericError,
    ShapeError,
    UnknownReference,
)
from .records import AttributionRecord, SentenceRecord, TokenOccurrence

EMBEDDING_DTYPE = np.dtype("<f4")

PROBABILITY_SUM_TOL = 1e-4


def _decode_utf8(data: bytes, artifact: str) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"{artifact} is not valid UTF-8", offset=exc.start) from None


def _lines(text: str) -> List[str]:
    # A single trailing newline is allowed and does not produce a line.
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


# ---------------------------------------------------------------------------
# corpus


def parse_corpus(data: bytes) -> List[SentenceRecord]:
    text = _decode_utf8(data, "corpus")
    lines = _lines(text)
    if not lines:
        raise InvalidArtifact("corpus stream is empty")
    records: List[SentenceRecord] = []
    for i, line in enumerate(lines):
        if "\t" in line:
            body, label = line.split("\t", 1)
            label = label.strip()
            if "\t" in label:
                raise InvalidArtifact("more than one tab on corpus line", line=i)
            if not label:
                raise InvalidArtifact("empty gold label", line=i)
        else:
            body, label = line, None
        words = body.split()
        if not words:
            raise InvalidArtifact("blank or wordless corpus line", line=i)
        records.append(
            SentenceRecord(
                sentence_id=i,
                text=" ".join(words),
                words=words,
                gold_label=label,
            )
        )
    return records


def serialize_corpus(sentences: Sequence[SentenceRecord]) -> bytes:
    out = []
    for s in sentences:
        line = s.text if s.gold_label is None else f"{s.text}\t{s.gold_label}"
        out.append(line)
    return ("\n".join(out) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# token manifest


def parse_tokens(data: bytes, sentences: Sequence[SentenceRecord]) -> List[TokenOccurrence]:
    text = _decode_utf8(data, "tokens manifest")
    lines = _lines(text)
    if not lines:
        raise InvalidArtifact("tokens manifest is empty")
    tokens: List[TokenOccurrence] = []
    prev_key: Tuple[int, int] = (-1, -1)
    for i, line in enumerate(lines):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError:
            raise InvalidArtifact("malformed token record", line=i) from None
        try:
            occ = int(rec["occurrence_id"])
            sid = int(rec["sentence_id"])
            pos = int(rec["position"])
            surface = rec["surface"]
        except (KeyError, TypeError, ValueError):
            raise InvalidArtifact("token record missing required fields", line=i) from None
        if occ != i:
            raise InvalidArtifact(
                "occurrence_id must be the dense 0-based line index", line=i, occurrence_id=occ
            )
        if not (0 <= sid < len(sentences)):
            raise UnknownReference("token references unknown sentence", line=i, sentence_id=sid)
        words = sentences[sid].words
        if not (0 <= pos < len(words)):
            raise InvalidArtifact("token position out of range", line=i, sentence_id=sid, position=pos)
        if (sid, pos) <= prev_key:
            raise InvalidArtifact(
                "token records must be strictly ordered by (sentence_id, position)",
                line=i,
            )
        if surface != words[pos]:
            raise AlignmentMismatch(
                "token surface disagrees with corpus word",
                sentence=sid,
                position=pos,
                expected=words[pos],
                got=surface,
            )
        if pos == 0:
            pass
        elif prev_key[0] == sid and prev_key[1] != pos - 1:
            raise InvalidArtifact(
                "token positions within a sentence must be contiguous", line=i, sentence_id=sid
            )
        if pos != 0 and prev_key[0] != sid:
            raise InvalidArtifact(
                "sentence coverage must start at position 0", line=i, sentence_id=sid
            )
        prev_key = (sid, pos)
        tokens.append(TokenOccurrence(occ, sid, pos, surface))
    # Sentences present in the manifest must be fully covered.
    last_pos: Dict[int, int] = {}
    for t in tokens:
        last_pos[t.sentence_id] = t.position
    for sid, pos in last_pos.items():
        if pos != len(sentences[sid].words) - 1:
            raise InvalidArtifact(
                "sentence only partially covered by token manifest", sentence_id=sid
            )
    return tokens


def serialize_tokens(tokens: Sequence[TokenOccurrence]) -> bytes:
    out = []
    for t in tokens:
        out.append(
            json.dumps(
                {
                    "occurrence_id": t.occurrence_id,
                    "sentence_id": t.sentence_id,
                    "position": t.position,
                    "surface": t.surface,
                },
                ensure_ascii=False,
            )
        )
    return ("\n".join(out) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# embeddings


def parse_embeddings_meta(data: bytes) -> dict:
    try:
        meta = json.loads(_decode_utf8(data, "embeddings meta"))
    except json.JSONDecodeError:
        raise InvalidArtifact("embeddings meta is not valid JSON") from None
    if not isinstance(meta, dict):
        raise InvalidArtifact("embeddings meta must be a JSON object")
    try:
        n = int(meta["n"])
        d = int(meta["d"])
    except (KeyError, TypeError, ValueError):
        raise InvalidArtifact("embeddings meta must declare integer n and d") from None
    if n < 1 or d < 1:
        raise ShapeError("embedding matrix must be non-empty", n=n, d=d)
    layer = int(meta.get("layer", 0))
    if layer < 0:
        raise InvalidArtifact("layer must be >= 0", layer=layer)
    return {
        "n": n,
        "d": d,
        "layer": layer,
        "model_name": str(meta.get("model_name", "")),
        "checksum": meta.get("checksum"),
    }


def validate_embeddings_buffer(meta: dict, buf: bytes) -> str:
    """Check buffer length and finiteness; return the sha256 checksum."""
    n, d = meta["n"], meta["d"]
    expected = n * d * EMBEDDING_DTYPE.itemsize
    if len(buf) != expected:
        raise ShapeError(
            "embedding buffer length does not match n*d*4",
            expected_bytes=expected,
            actual_bytes=len(buf),
            n=n,
            d=d,
        )
    arr = np.frombuffer(buf, dtype=EMBEDDING_DTYPE)
    if not np.isfinite(arr).all():
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise NumericError(
            "embedding buffer contains NaN or Inf",
            row=bad // d,
            column=bad % d,
        )
    checksum = hashlib.sha256(buf).hexdigest()
    declared = meta.get("checksum")
    if declared is not None and declared != checksum:
        raise InvalidArtifact(
            "embedding checksum mismatch", declared=declared, actual=checksum
        )
    return checksum


# ---------------------------------------------------------------------------
# tags


def parse_tags(
    data: bytes, sentences: Sequence[SentenceRecord]
) -> List[Tuple[int, int, str]]:
    """Parse a TSV tag file into (sentence_id, position, tag) triples.

    The file must mirror the corpus exactly: same sentence order, same
    words, blank line between sentences.
    """
    text = _decode_utf8(data, "tag file")
    lines = _lines(text)
    triples: List[Tuple[int, int, str]] = []
    sid, pos = 0, 0
    for i, line in enumerate(lines):
        if line.strip() == "":
            if pos == 0:
                raise InvalidArtifact("unexpected blank line in tag file", line=i)
            if sid < len(sentences) and pos != len(sentences[sid].words):
                raise AlignmentMismatch(
                    "tag sentence shorter than corpus sentence",
                    sentence=sid,
                    position=pos,
                    expected=sentences[sid].words[pos],
                )
            sid += 1
            pos = 0
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise InvalidArtifact("tag line must be 'word<TAB>tag'", line=i)
        word, tag = parts
        if sid >= len(sentences):
            raise AlignmentMismatch(
                "tag file has more sentences than the corpus", sentence=sid, position=pos
            )
        words = sentences[sid].words
        if pos >= len(words):
            raise AlignmentMismatch(
                "tag sentence longer than corpus sentence",
                sentence=sid,
                position=pos,
                got=word,
            )
        if word != words[pos]:
            raise AlignmentMismatch(
                "tag word disagrees with corpus word",
                sentence=sid,
                position=pos,
                expected=words[pos],
                got=word,
            )
        triples.append((sid, pos, tag))
        pos += 1
    if pos != 0:
        if pos != len(sentences[sid].words):
            raise AlignmentMismatch(
                "tag sentence shorter than corpus sentence", sentence=sid, position=pos
            )
        sid += 1
    if sid != len(sentences):
        raise AlignmentMismatch(
            "tag file has fewer sentences than the corpus", sentence=sid, position=0
        )
    return triples


def serialize_tags(
    triples: Sequence[Tuple[int, int, str]], sentences: Sequence[SentenceRecord]
) -> bytes:
    by_sentence: Dict[int, Dict[int, str]] = {}
    for sid, pos, tag in triples:
        by_sentence.setdefault(sid, {})[pos] = tag
    chunks = []
    for s in sentences:
        tags = by_sentence.get(s.sentence_id, {})
        rows = [f"{w}\t{tags[p]}" for p, w in enumerate(s.words)]
        chunks.append("\n".join(rows))
    return ("\n\n".join(chunks) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# attributions


def parse_attributions(
    data: bytes, sentences: Sequence[SentenceRecord]
) -> List[AttributionRecord]:
    text = _decode_utf8(data, "attributions")
    lines = _lines(text)
    if not lines:
        raise InvalidArtifact("attribution stream is empty")
    records: List[AttributionRecord] = []
    seen = set()
    for i, line in enumerate(lines):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError:
            raise InvalidArtifact("malformed attribution record", line=i) from None
        try:
            sid = int(rec["sentence_id"])
            predicted = str(rec["predicted_class"])
            probs = {str(k): float(v) for k, v in rec["class_probabilities"].items()}
            scores = [float(x) for x in rec["token_scores"]]
            delta = float(rec.get("convergence_delta", 0.0))
        except (KeyError, TypeError, ValueError, AttributeError):
            raise InvalidArtifact(
                "attribution record missing required fields", line=i
            ) from None
        if not (0 <= sid < len(sentences)):
            raise UnknownReference(
                "attribution references unknown sentence", line=i, sentence_id=sid
            )
        if sid in seen:
            raise InvalidArtifact("duplicate sentence_id in attributions", sentence_id=sid)
        seen.add(sid)
        words = sentences[sid].words
        if len(scores) != len(words):
            raise ShapeError(
                "token_scores length does not match sentence word count",
                sentence_id=sid,
                expected=len(words),
                actual=len(scores),
            )
        if not all(math.isfinite(x) for x in scores):
            raise NumericError("non-finite token score", sentence_id=sid)
        total = sum(probs.values())
        if not probs or not math.isfinite(total) or abs(total - 1.0) > PROBABILITY_SUM_TOL:
            raise NumericError(
                "class probabilities must sum to 1",
                sentence_id=sid,
                total=total,
            )
        records.append(AttributionRecord(sid, predicted, probs, scores, delta))
    return records


def serialize_attributions(records: Sequence[AttributionRecord]) -> bytes:
    out = []
    for r in records:
        out.append(
            json.dumps(
                {
                    "sentence_id": r.sentence_id,
                    "predicted_class": r.predicted_class,
                    "class_probabilities": r.class_probabilities,
                    "token_scores": r.token_scores,
                    "convergence_delta": r.convergence_delta,
                },
                ensure_ascii=False,
            )
        )
    return ("\n".join(out) + "\n").encode("utf-8")
