"""Latent concept analysis over transformer token representations.

Clusters contextual token embeddings into concepts with Ward
agglomeration, aligns the concepts against tag annotations, connects
them to per-token attribution scores, and serves the results over a
REST API.
"""

from .align import align_all, align_concept, class_affinity, generate_label
from .cluster import (
    Dendrogram,
    assign_nearest_concept,
    cut_dendrogram,
    ward_cluster,
    ward_cluster_oracle,
)
from .config import JobState, PipelineConfig
from .errors import ConceptLensError
from .explain import concept_relevance, explain_sentence, overview
from .pipeline import JobQueue, run_pipeline, start_pipeline
from .store import ProjectStore

__version__ = "0.1.0"

__all__ = [
    "Dendrogram",
    "ConceptLensError",
    "JobQueue",
    "JobState",
    "PipelineConfig",
    "ProjectStore",
    "align_all",
    "align_concept",
    "assign_nearest_concept",
    "class_affinity",
    "concept_relevance",
    "cut_dendrogram",
    "explain_sentence",
    "generate_label",
    "overview",
    "run_pipeline",
    "start_pipeline",
    "ward_cluster",
    "ward_cluster_oracle",
    "__version__",
]
