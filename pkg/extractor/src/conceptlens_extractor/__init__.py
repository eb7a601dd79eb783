"""Client-side artifact extractor for the conceptlens analysis service.

Runs a transformer classifier over a corpus to produce word-level
hidden-state embeddings, predictions, and integrated-gradients
attributions, then pushes the artifacts over HTTP.
"""

from .attribute import IGResult, attribute_corpus, integrated_gradients
from .config import ExtractionConfig
from .extract import ExtractionResult, extract_embeddings
from .push import PushReport, push_artifacts

__all__ = [
    "ExtractionConfig",
    "ExtractionResult",
    "IGResult",
    "PushReport",
    "attribute_corpus",
    "extract_embeddings",
    "integrated_gradients",
    "push_artifacts",
]
