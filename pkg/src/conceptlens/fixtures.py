"""Seeded synthetic analysis projects.

Builds a corpus whose token embeddings are drawn from well-separated
Gaussian clusters ("planted" concepts), each with its own small
vocabulary, plus tag annotations and attribution records consistent
with the planted structure. Clustering such a corpus should recover
the planted partition almost exactly, which makes these projects a
ground-truthed end-to-end fixture as well as demo data.

Tagsets produced:
- "pos": one tag per planted concept (perfect purity).
- "sem": one tag per class, shared by all concepts of that class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from .formats import (
    serialize_attributions,
    serialize_corpus,
    serialize_tags,
    serialize_tokens,
)
from .records import AttributionRecord, SentenceRecord, TokenOccurrence


@dataclass
class SyntheticSpec:
    n_sentences: int = 200
    n_concepts: int = 8
    dim: int = 32
    words_per_sentence: Tuple[int, int] = (4, 8)  # inclusive range
    types_per_concept: int = 6
    classes: Tuple[str, ...] = ("negative", "positive")
    center_scale: float = 5.0
    noise: float = 0.05
    predicted_accuracy: float = 0.9
    seed: int = 13


@dataclass
class SyntheticProject:
    corpus: bytes
    tokens: bytes
    embeddings_meta: dict
    embeddings: bytes
    tagsets: Dict[str, bytes]
    attributions: bytes
    # ground truth for verification
    occurrence_concept: List[int] = field(default_factory=list)
    concept_class: List[str] = field(default_factory=list)
    centers: np.ndarray = None


def build_synthetic_project(spec: SyntheticSpec = SyntheticSpec()) -> SyntheticProject:
    rng = np.random.RandomState(spec.seed)
    centers = rng.randn(spec.n_concepts, spec.dim) * spec.center_scale
    concept_class = [
        spec.classes[c * len(spec.classes) // spec.n_concepts]
        for c in range(spec.n_concepts)
    ]
    class_concepts = {
        cls: [c for c in range(spec.n_concepts) if concept_class[c] == cls]
        for cls in spec.classes
    }
    vocab = [
        [f"w{c}x{t}" for t in range(spec.types_per_concept)]
        for c in range(spec.n_concepts)
    ]

    sentences: List[SentenceRecord] = []
    tokens: List[TokenOccurrence] = []
    attributions: List[AttributionRecord] = []
    rows: List[np.ndarray] = []
    occurrence_concept: List[int] = []
    occ_id = 0
    lo, hi = spec.words_per_sentence
    for sid in range(spec.n_sentences):
        gold = spec.classes[sid % len(spec.classes)]
        n_words = int(rng.randint(lo, hi + 1))
        words = []
        word_concepts = []
        for pos in range(n_words):
            c = int(rng.choice(class_concepts[gold]))
            word = vocab[c][int(rng.randint(spec.types_per_concept))]
            words.append(word)
            word_concepts.append(c)
            rows.append(centers[c] + rng.randn(spec.dim) * spec.noise)
            tokens.append(
                TokenOccurrence(
                    occurrence_id=occ_id, sentence_id=sid, position=pos, surface=word
                )
            )
            occurrence_concept.append(c)
            occ_id += 1
        sentences.append(
            SentenceRecord(
                sentence_id=sid, text=" ".join(words), words=words, gold_label=gold
            )
        )
        correct = rng.rand() < spec.predicted_accuracy
        predicted = gold if correct else _other(spec.classes, gold)
        probs = {cls: 0.05 / (len(spec.classes) - 1) for cls in spec.classes}
        probs[predicted] = 0.95
        scores = [
            float(0.5 + rng.rand()) if concept_class[c] == predicted else float(-0.1 * rng.rand())
            for c in word_concepts
        ]
        attributions.append(
            AttributionRecord(
                sentence_id=sid,
                predicted_class=predicted,
                class_probabilities=probs,
                token_scores=scores,
                convergence_delta=float(rng.rand() * 1e-4),
            )
        )

    matrix = np.asarray(rows, dtype=np.float32)
    pos_tags = [
        (t.sentence_id, t.position, f"T{occurrence_concept[t.occurrence_id]}")
        for t in tokens
    ]
    sem_tags = [
        (t.sentence_id, t.position, concept_class[occurrence_concept[t.occurrence_id]].upper())
        for t in tokens
    ]
    return SyntheticProject(
        corpus=serialize_corpus(sentences),
        tokens=serialize_tokens(tokens),
        embeddings_meta={
            "n": matrix.shape[0],
            "d": matrix.shape[1],
            "layer": 12,
            "model_name": "synthetic-planted-gaussians",
        },
        embeddings=matrix.astype("<f4").tobytes(),
        tagsets={
            "pos": serialize_tags(pos_tags, sentences),
            "sem": serialize_tags(sem_tags, sentences),
        },
        attributions=serialize_attributions(attributions),
        occurrence_concept=occurrence_concept,
        concept_class=concept_class,
        centers=centers,
    )


def _other(classes: Tuple[str, ...], current: str) -> str:
    choices = [c for c in classes if c != current]
    return choices[0]


def write_artifact_dir(project: SyntheticProject, path: Path) -> None:
    """Lay the fixture out as a run-local artifact directory."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    (path / "corpus.txt").write_bytes(project.corpus)
    (path / "tokens.tsv").write_bytes(project.tokens)
    (path / "embeddings.json").write_text(json.dumps(project.embeddings_meta, indent=1))
    (path / "embeddings.f32").write_bytes(project.embeddings)
    for name, blob in project.tagsets.items():
        (path / f"tags.{name}.tsv").write_bytes(blob)
    (path / "attributions.jsonl").write_bytes(project.attributions)
