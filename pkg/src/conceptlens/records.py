"""Domain records passed between the store and the analysis engines."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import PipelineConfig


@dataclass
class SentenceRecord:
    sentence_id: int
    text: str  # canonical single-space joined form
    words: List[str]
    gold_label: Optional[str] = None


@dataclass(frozen=True)
class TokenOccurrence:
    occurrence_id: int
    sentence_id: int
    position: int
    surface: str


@dataclass
class AttributionRecord:
    sentence_id: int
    predicted_class: str
    class_probabilities: Dict[str, float]
    token_scores: List[float]
    convergence_delta: float


@dataclass
class Concept:
    concept_id: int
    member_occurrences: List[int]  # sorted ascending
    centroid: np.ndarray  # float64, mean of member embedding rows
    size: int

    def to_dict(self) -> dict:
        return {
            "concept_id": self.concept_id,
            "member_occurrences": list(map(int, self.member_occurrences)),
            "size": int(self.size),
        }


@dataclass(frozen=True)
class ConceptAlignment:
    concept_id: int
    tagset_name: str
    tag: str
    score: float


@dataclass
class ClassAffinity:
    concept_id: int
    distribution: Dict[str, float]
    dominant_class: str
    purity: float


@dataclass
class ConceptLabel:
    concept_id: int
    auto_label: str
    user_label: Optional[str] = None

    @property
    def display(self) -> str:
        return self.user_label if self.user_label else self.auto_label


@dataclass
class ConceptRelevance:
    concept_id: int
    relevance: float
    supporting_occurrence_count: int


@dataclass
class MatchedConcept:
    concept_id: int
    label: str
    trigger_positions: List[int]
    contribution: float


@dataclass
class SentenceExplanation:
    sentence_id: int
    predicted_class: str
    class_probabilities: Dict[str, float]
    word_saliencies: List[Tuple[int, str, float]]  # (position, surface, normalized)
    top_word: int
    matched_concepts: List[MatchedConcept]


@dataclass
class OverviewStats:
    concept_count: int
    alignment_coverage: Dict[str, float]
    histogram_edges: Sequence[float]
    histogram_counts: List[int]
    top_salient_concepts: List[dict]
    class_distribution: Dict[str, float]


@dataclass
class AnalysisProject:
    project_id: str
    name: str
    model_name: str = ""
    layer: int = 0
    config: PipelineConfig = field(default_factory=PipelineConfig)
    created_at: str = ""
    updated_at: str = ""


# Fixed log-ish bucket edges for the concept size histogram; the final
# bucket is open-ended.
SIZE_HISTOGRAM_EDGES: Tuple[float, ...] = (1, 2, 5, 10, 25, 50, 100, 250, float("inf"))
