"""Corpus file grammar shared by every command.

One sentence per line, words separated by whitespace, an optional
trailing tab plus gold label. Whitespace is canonicalized to single
spaces so emitted artifacts round-trip byte-identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

from .errors import CorpusError


@dataclass(frozen=True)
class Sentence:
    words: List[str]
    gold_label: Optional[str] = None

    @property
    def text(self) -> str:
        return " ".join(self.words)


def read_corpus(data: bytes) -> List[Sentence]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusError("corpus is not valid UTF-8", offset=exc.start) from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    lines = [ln[:-1] if ln.endswith("\r") else ln for ln in lines]
    if not lines:
        raise CorpusError("corpus stream is empty")
    sentences: List[Sentence] = []
    for i, line in enumerate(lines):
        if "\t" in line:
            body, label = line.split("\t", 1)
            label = label.strip()
            if "\t" in label or not label:
                raise CorpusError("malformed corpus label", line=i)
        else:
            body, label = line, None
        words = body.split()
        if not words:
            raise CorpusError("blank or wordless corpus line", line=i)
        sentences.append(Sentence(words=words, gold_label=label))
    return sentences


def serialize_corpus(sentences: Sequence[Sentence]) -> bytes:
    out = []
    for s in sentences:
        out.append(s.text if s.gold_label is None else f"{s.text}\t{s.gold_label}")
    return ("\n".join(out) + "\n").encode("utf-8")
