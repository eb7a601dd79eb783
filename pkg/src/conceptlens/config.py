"""Pipeline configuration and the project job-state machine."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Optional, Sequence

from .errors import ValidationError


class JobState(str, Enum):
    CREATED = "CREATED"
    ACCEPTING_ARTIFACTS = "ACCEPTING_ARTIFACTS"
    QUEUED = "QUEUED"
    CLUSTERING = "CLUSTERING"
    ALIGNING = "ALIGNING"
    SCORING = "SCORING"
    READY = "READY"
    FAILED = "FAILED"


# Forward edges of the lifecycle; FAILED is additionally reachable from
# every non-terminal state. READY and FAILED are terminal.
_FORWARD_EDGES = {
    JobState.CREATED: {JobState.ACCEPTING_ARTIFACTS},
    JobState.ACCEPTING_ARTIFACTS: {JobState.QUEUED},
    JobState.QUEUED: {JobState.CLUSTERING},
    JobState.CLUSTERING: {JobState.ALIGNING},
    JobState.ALIGNING: {JobState.SCORING},
    JobState.SCORING: {JobState.READY},
    JobState.READY: set(),
    JobState.FAILED: set(),
}

ACTIVE_STATES = frozenset(
    {JobState.QUEUED, JobState.CLUSTERING, JobState.ALIGNING, JobState.SCORING}
)
TERMINAL_STATES = frozenset({JobState.READY, JobState.FAILED})

# Legal chain order, used by tests to check observed status sequences.
STATE_ORDER = [
    JobState.CREATED,
    JobState.ACCEPTING_ARTIFACTS,
    JobState.QUEUED,
    JobState.CLUSTERING,
    JobState.ALIGNING,
    JobState.SCORING,
    JobState.READY,
]

# Nominal progress at entry to each state.
STATE_PROGRESS = {
    JobState.CREATED: 0.0,
    JobState.ACCEPTING_ARTIFACTS: 0.0,
    JobState.QUEUED: 0.05,
    JobState.CLUSTERING: 0.10,
    JobState.ALIGNING: 0.60,
    JobState.SCORING: 0.80,
    JobState.READY: 1.0,
}


def can_transition(src: JobState, dst: JobState) -> bool:
    if dst == JobState.FAILED:
        return src not in TERMINAL_STATES
    return dst in _FORWARD_EDGES[src]


@dataclass
class JobStatus:
    state: JobState = JobState.CREATED
    progress: float = 0.0
    failure_reason: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "state": self.state.value,
            "progress": self.progress,
            "failure_reason": self.failure_reason,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "JobStatus":
        return cls(
            state=JobState(d["state"]),
            progress=float(d.get("progress", 0.0)),
            failure_reason=d.get("failure_reason"),
        )


@dataclass
class PipelineConfig:
    """Knobs for one analysis run.

    ``max_occurrences_per_type=None`` means unlimited. ``ig_steps`` is
    provenance recorded from whatever produced the attribution artifact;
    the core pipeline never recomputes attributions itself.
    """

    cluster_count: int = 400
    alignment_threshold: float = 0.9
    max_occurrences_per_type: Optional[int] = 10
    min_type_frequency: int = 1
    ig_steps: int = 128
    saliency_floor: float = 0.2
    tagsets: Sequence[str] = field(default_factory=tuple)

    def validate(self) -> None:
        if not isinstance(self.cluster_count, int) or self.cluster_count < 2:
            raise ValidationError(
                "cluster_count must be an integer >= 2",
                cluster_count=self.cluster_count,
            )
        if not (0.0 < float(self.alignment_threshold) <= 1.0):
            raise ValidationError(
                "alignment_threshold must lie in (0, 1]",
                alignment_threshold=self.alignment_threshold,
            )
        if self.max_occurrences_per_type is not None and self.max_occurrences_per_type < 1:
            raise ValidationError(
                "max_occurrences_per_type must be >= 1 or null for unlimited",
                max_occurrences_per_type=self.max_occurrences_per_type,
            )
        if self.min_type_frequency < 1:
            raise ValidationError(
                "min_type_frequency must be >= 1",
                min_type_frequency=self.min_type_frequency,
            )
        if self.ig_steps < 1:
            raise ValidationError("ig_steps must be >= 1", ig_steps=self.ig_steps)
        if not (0.0 <= float(self.saliency_floor) <= 1.0):
            raise ValidationError(
                "saliency_floor must lie in [0, 1]", saliency_floor=self.saliency_floor
            )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tagsets"] = list(self.tagsets)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValidationError("unknown config fields", fields=sorted(unknown))
        cfg = cls(**{k: v for k, v in d.items() if k in known})
        if cfg.max_occurrences_per_type is not None:
            cfg.max_occurrences_per_type = int(cfg.max_occurrences_per_type)
        cfg.tagsets = tuple(cfg.tagsets)
        cfg.validate()
        return cfg
