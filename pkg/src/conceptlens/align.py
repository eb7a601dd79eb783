"""Aligning latent concepts with external tag annotations.

A concept aligns with a tag when most of its member occurrences carry
that tag: f(t) = |members tagged t| / |members with any tag| and the
concept aligns with argmax_t f(t) when f(t*) >= threshold. Concepts
where fewer than half the members carry any tag are never aligned
(partially tagged corpora say too little about the rest). Ties on the
fraction break alphabetically by tag.

Also houses class-affinity scoring (how a concept's members distribute
over prediction classes) and the deterministic auto-label generator.
"""

from __future__ import annotations

from collections import Counter
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import InvalidConcept, MissingLabels
from .records import ClassAffinity, Concept, ConceptAlignment, ConceptLabel


def align_concept(
    concept: Concept,
    occurrence_tags: Mapping[int, Optional[str]],
    threshold: float,
    tagset: str = "",
) -> Optional[ConceptAlignment]:
    """Best-tag alignment for one concept under one tagset, or None.

    ``occurrence_tags`` maps occurrence id to its tag in this tagset;
    missing/None entries mean the occurrence is untagged.
    """
    if not concept.member_occurrences:
        raise InvalidConcept("cannot align an empty concept", concept_id=concept.concept_id)
    counts: Counter = Counter()
    tagged = 0
    for occ in concept.member_occurrences:
        tag = occurrence_tags.get(occ)
        if tag is not None:
            tagged += 1
            counts[tag] += 1
    if 2 * tagged < len(concept.member_occurrences) or tagged == 0:
        return None
    best_tag = min(counts, key=lambda t: (-counts[t], t))
    fraction = counts[best_tag] / tagged
    if fraction >= threshold:
        return ConceptAlignment(
            concept_id=concept.concept_id, tagset_name=tagset, tag=best_tag, score=fraction
        )
    return None


def align_all(
    concepts: Sequence[Concept],
    annotations: Mapping[str, Mapping[int, Optional[str]]],
    threshold: float,
) -> Tuple[List[ConceptAlignment], Dict[str, float]]:
    """align_concept over concepts x tagsets.

    Returns the alignment table (rows only for aligned pairs) and
    per-tagset coverage = aligned concepts / total concepts.
    """
    table: List[ConceptAlignment] = []
    coverage: Dict[str, float] = {}
    for tagset in sorted(annotations):
        tags = annotations[tagset]
        aligned = 0
        for concept in concepts:
            row = align_concept(concept, tags, threshold, tagset=tagset)
            if row is not None:
                table.append(row)
                aligned += 1
        coverage[tagset] = aligned / len(concepts) if concepts else 0.0
    return table, coverage


def class_affinity(
    concept: Concept, sentence_labels: Mapping[int, str], occurrence_sentence: Mapping[int, int]
) -> ClassAffinity:
    """Distribution of a concept's members over sentence classes.

    ``sentence_labels`` should already encode the gold-else-predicted
    fallback. Dominant class ties break alphabetically.
    """
    counts: Counter = Counter()
    for occ in concept.member_occurrences:
        sid = occurrence_sentence[occ]
        label = sentence_labels.get(sid)
        if label is None:
            raise MissingLabels(
                "no class label available for a member sentence",
                concept_id=concept.concept_id,
                sentence_id=sid,
            )
        counts[label] += 1
    if not counts:
        raise MissingLabels("concept has no members to score", concept_id=concept.concept_id)
    total = sum(counts.values())
    distribution = {label: counts[label] / total for label in sorted(counts)}
    dominant = min(counts, key=lambda lab: (-counts[lab], lab))
    return ClassAffinity(
        concept_id=concept.concept_id,
        distribution=distribution,
        dominant_class=dominant,
        purity=counts[dominant] / total,
    )


def generate_label(
    concept: Concept,
    alignments: Sequence[ConceptAlignment],
    occurrence_surface: Mapping[int, str],
) -> ConceptLabel:
    """Deterministic auto label: "<tag|latent>:<top-3 types>#<id>".

    The tag comes from the concept's best-scoring alignment across all
    tagsets (score ties: alphabetical tagset, then tag). Top types are
    the concept's most frequent member word types, ties alphabetical.
    """
    mine = [a for a in alignments if a.concept_id == concept.concept_id]
    if mine:
        best = min(mine, key=lambda a: (-a.score, a.tagset_name, a.tag))
        prefix = best.tag
    else:
        prefix = "latent"
    freq: Counter = Counter(occurrence_surface[occ] for occ in concept.member_occurrences)
    top = sorted(freq, key=lambda w: (-freq[w], w))[:3]
    return ConceptLabel(
        concept_id=concept.concept_id,
        auto_label=f"{prefix}:{','.join(top)}#{concept.concept_id}",
        user_label=None,
    )


def serialize_alignments(table: Sequence[ConceptAlignment]) -> bytes:
    lines = [f"{a.concept_id}\t{a.tagset_name}\t{a.tag}\t{a.score!r}" for a in table]
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")
