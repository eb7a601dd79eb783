"""Sentence explanations, concept relevance, and the overview rollup.

Raw per-word attribution scores are normalized per sentence by the
maximum absolute score, so values land in [-1, 1] and the trigger
threshold is scale invariant. Words with positive normalized saliency
at or above the floor are triggers; each trigger is matched to the
concept containing its token occurrence. Occurrences dropped by
frequency filtering never joined a cluster, so they are resolved to the
nearest concept centroid instead.

Concept relevance aggregates positive raw attribution mass over each
concept's member occurrences and normalizes across concepts, ranking
concepts by how much of the model's attributed evidence they carry.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from typing import Callable, Dict, List, Mapping, Sequence, Tuple

import numpy as np

from .cluster import assign_nearest_concept
from .records import (
    SIZE_HISTOGRAM_EDGES,
    AttributionRecord,
    Concept,
    ConceptLabel,
    ConceptRelevance,
    MatchedConcept,
    OverviewStats,
    SentenceExplanation,
    SentenceRecord,
)


def normalize_saliency(raw: Sequence[float]) -> Tuple[List[float], int]:
    """Scores divided by max |raw| plus the top-word position.

    All-zero input stays all-zero with top_word 0 by convention. Ties on
    |score| keep the earliest position.
    """
    arr = np.asarray(raw, dtype=np.float64)
    peak = np.abs(arr).max() if arr.size else 0.0
    if peak == 0.0:
        return [0.0] * len(raw), 0
    top = int(np.abs(arr).argmax())
    return (arr / peak).tolist(), top


def explain_sentence(
    sentence: SentenceRecord,
    attribution: AttributionRecord,
    occurrence_of: Mapping[Tuple[int, int], int],
    membership: Mapping[int, int],
    concepts: Sequence[Concept],
    labels: Mapping[int, ConceptLabel],
    embedding_row: Callable[[int], np.ndarray],
    saliency_floor: float,
) -> SentenceExplanation:
    """Assemble the per-sentence explanation.

    ``occurrence_of`` maps (sentence_id, position) to occurrence id over
    the full token artifact; ``membership`` maps retained occurrence ids
    to concept ids. ``embedding_row`` fetches one occurrence's embedding
    for nearest-centroid fallback on filtered occurrences.
    """
    normalized, top_word = normalize_saliency(attribution.token_scores)
    saliencies = [
        (pos, sentence.words[pos], normalized[pos]) for pos in range(len(sentence.words))
    ]
    triggers: Dict[int, List[int]] = defaultdict(list)
    for pos, score in enumerate(normalized):
        if score < saliency_floor or score <= 0.0:
            continue
        occ = occurrence_of[(sentence.sentence_id, pos)]
        cid = membership.get(occ)
        if cid is None:
            cid = assign_nearest_concept(embedding_row(occ), concepts)
        triggers[cid].append(pos)
    matched = [
        MatchedConcept(
            concept_id=cid,
            label=labels[cid].display if cid in labels else "",
            trigger_positions=positions,
            contribution=float(sum(normalized[p] for p in positions)),
        )
        for cid, positions in triggers.items()
    ]
    matched.sort(key=lambda m: (-m.contribution, m.concept_id))
    return SentenceExplanation(
        sentence_id=sentence.sentence_id,
        predicted_class=attribution.predicted_class,
        class_probabilities=dict(attribution.class_probabilities),
        word_saliencies=saliencies,
        top_word=top_word,
        matched_concepts=matched,
    )


def concept_relevance(
    concepts: Sequence[Concept],
    attributions: Mapping[int, AttributionRecord],
    occurrence_of: Mapping[Tuple[int, int], int],
    membership: Mapping[int, int],
) -> List[ConceptRelevance]:
    """Positive attribution mass per concept, normalized across concepts.

    Only member occurrences count (filtered occurrences carry no mass).
    Results are ordered by concept_id; with zero total positive mass all
    relevances are 0.
    """
    raw_mass = {c.concept_id: 0.0 for c in concepts}
    support = {c.concept_id: 0 for c in concepts}
    for sid in sorted(attributions):
        record = attributions[sid]
        for pos, score in enumerate(record.token_scores):
            if score <= 0.0:
                continue
            occ = occurrence_of.get((sid, pos))
            if occ is None:
                continue
            cid = membership.get(occ)
            if cid is None:
                continue
            raw_mass[cid] += score
            support[cid] += 1
    total = sum(raw_mass.values())
    return [
        ConceptRelevance(
            concept_id=cid,
            relevance=(raw_mass[cid] / total) if total > 0 else 0.0,
            supporting_occurrence_count=support[cid],
        )
        for cid in sorted(raw_mass)
    ]


def size_histogram(sizes: Sequence[int]) -> Tuple[List[float], List[int]]:
    edges = list(SIZE_HISTOGRAM_EDGES)
    counts = [0] * (len(edges) - 1)
    for s in sizes:
        for i in range(len(counts)):
            if edges[i] <= s < edges[i + 1]:
                counts[i] += 1
                break
    return edges, counts


def overview(
    concepts: Sequence[Concept],
    alignment_coverage: Mapping[str, float],
    relevance: Sequence[ConceptRelevance],
    labels: Mapping[int, ConceptLabel],
    attributions: Mapping[int, AttributionRecord],
) -> OverviewStats:
    edges, counts = size_histogram([c.size for c in concepts])
    by_relevance = sorted(relevance, key=lambda r: (-r.relevance, r.concept_id))[:10]
    size_of = {c.concept_id: c.size for c in concepts}
    top = [
        {
            "concept_id": r.concept_id,
            "label": labels[r.concept_id].display if r.concept_id in labels else "",
            "relevance": r.relevance,
            "size": size_of.get(r.concept_id, 0),
        }
        for r in by_relevance
    ]
    class_counts = Counter(a.predicted_class for a in attributions.values())
    n_attr = sum(class_counts.values())
    class_distribution = {
        cls: class_counts[cls] / n_attr for cls in sorted(class_counts)
    }
    return OverviewStats(
        concept_count=len(concepts),
        alignment_coverage=dict(alignment_coverage),
        histogram_edges=edges,
        histogram_counts=counts,
        top_salient_concepts=top,
        class_distribution=class_distribution,
    )
