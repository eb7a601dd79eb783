"""Exception hierarchy shared by the store, engines, and REST layer.

Every error carries a stable ``code`` (mirrored into API error bodies)
and an ``http_status`` used by the service when the error escapes a
request handler.
"""

from __future__ import annotations

from typing import Any


class ConceptLensError(Exception):
    code = "InternalError"
    http_status = 500

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def as_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "details": self.details}


class ValidationError(ConceptLensError):
    code = "ValidationError"
    http_status = 422


class InvalidArtifact(ConceptLensError):
    code = "InvalidArtifact"
    http_status = 422


class EncodingError(ConceptLensError):
    code = "EncodingError"
    http_status = 422


class ShapeError(ConceptLensError):
    code = "ShapeError"
    http_status = 422


class NumericError(ConceptLensError):
    code = "NumericError"
    http_status = 422


class AlignmentMismatch(ConceptLensError):
    code = "AlignmentMismatch"
    http_status = 422


class UnknownReference(ConceptLensError):
    """A payload or path referenced an entity that does not exist."""

    code = "UnknownReference"
    http_status = 404


class InsufficientData(ConceptLensError):
    code = "InsufficientData"
    http_status = 422


class InvalidK(ConceptLensError):
    code = "InvalidK"
    http_status = 422


class InvalidConcept(ConceptLensError):
    code = "InvalidConcept"
    http_status = 422


class MissingLabels(ConceptLensError):
    code = "MissingLabels"
    http_status = 422


class MissingArtifact(ConceptLensError):
    code = "MissingArtifact"
    http_status = 409


class PreconditionFailed(ConceptLensError):
    code = "PreconditionFailed"
    http_status = 412


class StateConflict(ConceptLensError):
    """Operation not permitted in the project's current job state."""

    code = "StateConflict"
    http_status = 409
