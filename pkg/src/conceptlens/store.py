"""Project directory store: artifact persistence and ingestion.

One directory per project, append-nothing-in-place: every write goes
through a temp file and an atomic rename, so readers never observe a
torn artifact and a crash never leaves a half-written file behind.

Layout:
    <root>/<project_id>/
        project.json            identity + config
        state.json              job state machine snapshot
        corpus.txt              canonicalized corpus
        tokens.jsonl            token manifest (verbatim upload)
        embeddings.meta.json    {n, d, layer, model_name, checksum}
        embeddings.f32          raw little-endian float32 rows
        tags/<tagset>.tsv       verbatim uploads
        attributions.jsonl      verbatim upload
        results/                derived pipeline outputs

Concurrency: many readers, one writer per project. Writers serialize on
an in-process per-project lock; distinct projects ingest in parallel.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import formats
from .cluster import Dendrogram, dendrogram_from_tsv, dendrogram_to_tsv
from .config import JobState, JobStatus, PipelineConfig, can_transition
from .errors import (
    InsufficientData,
    MissingArtifact,
    ShapeError,
    StateConflict,
    UnknownReference,
    ValidationError,
)
from .records import (
    AnalysisProject,
    AttributionRecord,
    ClassAffinity,
    Concept,
    ConceptAlignment,
    ConceptLabel,
    ConceptRelevance,
    OverviewStats,
    SentenceRecord,
    TokenOccurrence,
)

_SAFE_NAME = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-")


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _atomic_write(path: Path, data: bytes, durable: bool = False) -> None:
    tmp = path.with_name(f".{path.name}.{uuid.uuid4().hex[:8]}.tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        if durable:
            fh.flush()
            os.fsync(fh.fileno())
    os.replace(tmp, path)
    if durable:
        dirfd = os.open(path.parent, os.O_DIRECTORY)
        try:
            os.fsync(dirfd)
        finally:
            os.close(dirfd)


def _atomic_write_json(path: Path, obj, durable: bool = False) -> None:
    _atomic_write(path, (json.dumps(obj, indent=1) + "\n").encode("utf-8"), durable)


@dataclass
class PipelineResults:
    """Everything the pipeline derives for one project."""

    retained: np.ndarray
    dendrogram: Dendrogram
    concepts: List[Concept]
    alignments: List[ConceptAlignment]
    coverage: Dict[str, float]
    labels: Dict[int, ConceptLabel]
    affinities: Dict[int, ClassAffinity] = field(default_factory=dict)
    relevance: Dict[int, ConceptRelevance] = field(default_factory=dict)
    overview: Optional[OverviewStats] = None


class ProjectStore:
    def __init__(self, root: os.PathLike | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: Dict[str, threading.RLock] = {}
        self._locks_guard = threading.Lock()
        self._cache: Dict[Tuple[str, str], Tuple[Tuple[int, int], object]] = {}

    # -- locking ---------------------------------------------------------

    def lock(self, project_id: str) -> threading.RLock:
        with self._locks_guard:
            if project_id not in self._locks:
                self._locks[project_id] = threading.RLock()
            return self._locks[project_id]

    # -- paths -----------------------------------------------------------

    def _dir(self, project_id: str) -> Path:
        return self.root / project_id

    def _path(self, project_id: str, name: str) -> Path:
        return self._dir(project_id) / name

    def _results_dir(self, project_id: str) -> Path:
        return self._dir(project_id) / "results"

    # -- projects --------------------------------------------------------

    def create_project(
        self,
        name: str,
        config: Optional[PipelineConfig] = None,
        model_name: str = "",
        layer: int = 0,
    ) -> AnalysisProject:
        if not name or not name.strip():
            raise ValidationError("project name must be non-empty")
        if layer < 0:
            raise ValidationError("layer must be >= 0", layer=layer)
        config = config or PipelineConfig()
        config.validate()
        project_id = uuid.uuid4().hex[:12]
        project = AnalysisProject(
            project_id=project_id,
            name=name.strip(),
            model_name=model_name,
            layer=layer,
            config=config,
            created_at=_utcnow(),
            updated_at=_utcnow(),
        )
        pdir = self._dir(project_id)
        pdir.mkdir(parents=True)
        (pdir / "tags").mkdir()
        self._save_project(project)
        # CREATED is momentary: a stored project is already accepting uploads.
        _atomic_write_json(
            self._path(project_id, "state.json"),
            JobStatus(JobState.ACCEPTING_ARTIFACTS, 0.0).to_dict(),
            durable=True,
        )
        return project

    def _save_project(self, project: AnalysisProject) -> None:
        _atomic_write_json(
            self._path(project.project_id, "project.json"),
            {
                "project_id": project.project_id,
                "name": project.name,
                "model_name": project.model_name,
                "layer": project.layer,
                "config": project.config.to_dict(),
                "created_at": project.created_at,
                "updated_at": project.updated_at,
            },
            durable=True,
        )

    def get_project(self, project_id: str) -> AnalysisProject:
        path = self._path(project_id, "project.json")
        if not path.exists():
            raise UnknownReference("unknown project", project_id=project_id)
        d = json.loads(path.read_text("utf-8"))
        return AnalysisProject(
            project_id=d["project_id"],
            name=d["name"],
            model_name=d.get("model_name", ""),
            layer=int(d.get("layer", 0)),
            config=PipelineConfig.from_dict(d["config"]),
            created_at=d.get("created_at", ""),
            updated_at=d.get("updated_at", ""),
        )

    def list_projects(self) -> List[AnalysisProject]:
        out = []
        for entry in sorted(self.root.iterdir()):
            if entry.is_dir() and (entry / "project.json").exists():
                out.append(self.get_project(entry.name))
        return out

    # -- job state ---------------------------------------------------------

    def get_status(self, project_id: str) -> JobStatus:
        self.get_project(project_id)
        path = self._path(project_id, "state.json")
        return JobStatus.from_dict(json.loads(path.read_text("utf-8")))

    def set_state(
        self,
        project_id: str,
        state: JobState,
        progress: Optional[float] = None,
        failure_reason: Optional[str] = None,
    ) -> JobStatus:
        with self.lock(project_id):
            current = self.get_status(project_id)
            if state != current.state and not can_transition(current.state, state):
                raise StateConflict(
                    f"illegal state transition {current.state.value} -> {state.value}",
                    current=current.state.value,
                    requested=state.value,
                )
            from .config import STATE_PROGRESS

            status = JobStatus(
                state=state,
                progress=STATE_PROGRESS.get(state, current.progress)
                if progress is None
                else progress,
                failure_reason=failure_reason if state == JobState.FAILED else None,
            )
            _atomic_write_json(
                self._path(project_id, "state.json"), status.to_dict(), durable=True
            )
            self._touch(project_id)
            return status

    def require_state(self, project_id: str, *states: JobState) -> JobStatus:
        status = self.get_status(project_id)
        if status.state not in states:
            raise StateConflict(
                "operation not permitted in current state",
                current=status.state.value,
                required=[s.value for s in states],
            )
        return status

    def _touch(self, project_id: str) -> None:
        project = self.get_project(project_id)
        project.updated_at = _utcnow()
        self._save_project(project)

    # -- cached parsing ----------------------------------------------------

    def _cached(self, project_id: str, name: str, parser):
        path = self._path(project_id, name)
        st = os.stat(path)
        key = (st.st_mtime_ns, st.st_size)
        cached = self._cache.get((project_id, name))
        if cached is not None and cached[0] == key:
            return cached[1]
        value = parser(path.read_bytes())
        self._cache[(project_id, name)] = (key, value)
        return value

    def _invalidate(self, project_id: str) -> None:
        for k in [k for k in self._cache if k[0] == project_id]:
            del self._cache[k]

    # -- ingestion ---------------------------------------------------------

    def _require_accepting(self, project_id: str) -> None:
        self.require_state(project_id, JobState.ACCEPTING_ARTIFACTS)

    def _drop(self, project_id: str, *names: str) -> None:
        for name in names:
            path = self._path(project_id, name)
            if path.is_dir():
                for child in path.iterdir():
                    child.unlink()
            elif path.exists():
                path.unlink()
        self._invalidate(project_id)

    def ingest_corpus(self, project_id: str, data: bytes) -> int:
        with self.lock(project_id):
            self._require_accepting(project_id)
            sentences = formats.parse_corpus(data)
            # Replacing the corpus invalidates everything keyed to it.
            self._drop(
                project_id, "tokens.jsonl", "embeddings.meta.json", "embeddings.f32",
                "tags", "attributions.jsonl",
            )
            _atomic_write(
                self._path(project_id, "corpus.txt"), formats.serialize_corpus(sentences)
            )
            self._set_config_tagsets(project_id, [])
            self._touch(project_id)
            return len(sentences)

    def ingest_tokens(self, project_id: str, data: bytes) -> int:
        with self.lock(project_id):
            self._require_accepting(project_id)
            sentences = self.load_sentences(project_id)
            tokens = formats.parse_tokens(data, sentences)
            # Embeddings and tags are keyed by occurrence id.
            self._drop(project_id, "embeddings.meta.json", "embeddings.f32", "tags")
            self._set_config_tagsets(project_id, [])
            _atomic_write(self._path(project_id, "tokens.jsonl"), data)
            self._touch(project_id)
            return len(tokens)

    def ingest_embeddings(self, project_id: str, meta: dict | bytes, buffer: bytes) -> dict:
        with self.lock(project_id):
            self._require_accepting(project_id)
            if isinstance(meta, (bytes, bytearray)):
                meta = formats.parse_embeddings_meta(bytes(meta))
            else:
                meta = formats.parse_embeddings_meta(
                    json.dumps(meta).encode("utf-8")
                )
            tokens = self.load_tokens(project_id)
            if meta["n"] != len(tokens):
                raise ShapeError(
                    "embedding row count must equal the token manifest size",
                    n=meta["n"],
                    manifest=len(tokens),
                )
            checksum = formats.validate_embeddings_buffer(meta, buffer)
            meta = dict(meta, checksum=checksum)
            _atomic_write(self._path(project_id, "embeddings.f32"), buffer)
            _atomic_write_json(self._path(project_id, "embeddings.meta.json"), meta)
            self._invalidate(project_id)
            self._touch(project_id)
            return meta

    def ingest_tags(self, project_id: str, tagset_name: str, data: bytes) -> int:
        if not tagset_name or not set(tagset_name) <= _SAFE_NAME:
            raise ValidationError(
                "tagset name must be non-empty [A-Za-z0-9_-]", tagset=tagset_name
            )
        with self.lock(project_id):
            self._require_accepting(project_id)
            sentences = self.load_sentences(project_id)
            tokens = self.load_tokens(project_id)
            triples = formats.parse_tags(data, sentences)
            by_pos = {(t.sentence_id, t.position): t.occurrence_id for t in tokens}
            annotated = sum(1 for sid, pos, _ in triples if (sid, pos) in by_pos)
            _atomic_write(self._path(project_id, f"tags/{tagset_name}.tsv"), data)
            names = sorted(set(self.tagset_names(project_id)))
            self._set_config_tagsets(project_id, names)
            self._invalidate(project_id)
            self._touch(project_id)
            return annotated

    def ingest_attributions(self, project_id: str, data: bytes) -> int:
        with self.lock(project_id):
            self._require_accepting(project_id)
            sentences = self.load_sentences(project_id)
            records = formats.parse_attributions(data, sentences)
            _atomic_write(self._path(project_id, "attributions.jsonl"), data)
            self._invalidate(project_id)
            self._touch(project_id)
            return len(records)

    def _set_config_tagsets(self, project_id: str, names: Sequence[str]) -> None:
        project = self.get_project(project_id)
        project.config.tagsets = tuple(names)
        self._save_project(project)

    # -- artifact access ---------------------------------------------------

    def artifacts_present(self, project_id: str) -> dict:
        self.get_project(project_id)
        return {
            "corpus": self._path(project_id, "corpus.txt").exists(),
            "tokens": self._path(project_id, "tokens.jsonl").exists(),
            "embeddings": self._path(project_id, "embeddings.f32").exists()
            and self._path(project_id, "embeddings.meta.json").exists(),
            "attributions": self._path(project_id, "attributions.jsonl").exists(),
            "tags": self.tagset_names(project_id),
        }

    def tagset_names(self, project_id: str) -> List[str]:
        tags_dir = self._path(project_id, "tags")
        if not tags_dir.is_dir():
            return []
        return sorted(p.stem for p in tags_dir.glob("*.tsv"))

    def _require_artifact(self, project_id: str, name: str, label: str) -> Path:
        path = self._path(project_id, name)
        if not path.exists():
            self.get_project(project_id)
            raise MissingArtifact(f"{label} not ingested", project_id=project_id)
        return path

    def load_sentences(self, project_id: str) -> List[SentenceRecord]:
        self._require_artifact(project_id, "corpus.txt", "corpus")
        return self._cached(project_id, "corpus.txt", formats.parse_corpus)

    def load_tokens(self, project_id: str) -> List[TokenOccurrence]:
        self._require_artifact(project_id, "tokens.jsonl", "token manifest")
        sentences = self.load_sentences(project_id)
        return self._cached(
            project_id, "tokens.jsonl", lambda b: formats.parse_tokens(b, sentences)
        )

    def embeddings_meta(self, project_id: str) -> dict:
        path = self._require_artifact(project_id, "embeddings.meta.json", "embeddings")
        return json.loads(path.read_text("utf-8"))

    def load_embeddings(self, project_id: str) -> np.ndarray:
        """Memory-mapped (n, d) float32 view of the embedding matrix."""
        meta = self.embeddings_meta(project_id)
        path = self._require_artifact(project_id, "embeddings.f32", "embeddings")
        return np.memmap(
            path, dtype=formats.EMBEDDING_DTYPE, mode="r", shape=(meta["n"], meta["d"])
        )

    def load_tags(self, project_id: str, tagset_name: str) -> Dict[int, str]:
        path = self._path(project_id, f"tags/{tagset_name}.tsv")
        if not path.exists():
            raise UnknownReference("unknown tagset", tagset=tagset_name)
        sentences = self.load_sentences(project_id)
        tokens = self.load_tokens(project_id)
        triples = self._cached(
            project_id,
            f"tags/{tagset_name}.tsv",
            lambda b: formats.parse_tags(b, sentences),
        )
        by_pos = {(t.sentence_id, t.position): t.occurrence_id for t in tokens}
        return {
            by_pos[(sid, pos)]: tag
            for sid, pos, tag in triples
            if (sid, pos) in by_pos
        }

    def load_all_tags(self, project_id: str) -> Dict[str, Dict[int, str]]:
        return {
            name: self.load_tags(project_id, name)
            for name in self.tagset_names(project_id)
        }

    def load_attributions(self, project_id: str) -> Dict[int, AttributionRecord]:
        path = self._path(project_id, "attributions.jsonl")
        if not path.exists():
            return {}
        sentences = self.load_sentences(project_id)
        records = self._cached(
            project_id,
            "attributions.jsonl",
            lambda b: formats.parse_attributions(b, sentences),
        )
        return {r.sentence_id: r for r in records}

    def export_artifact(self, project_id: str, name: str) -> bytes:
        """Raw bytes of a persisted artifact, as served back to clients."""
        mapping = {
            "corpus": "corpus.txt",
            "tokens": "tokens.jsonl",
            "attributions": "attributions.jsonl",
            "embeddings": "embeddings.f32",
            "embeddings.meta": "embeddings.meta.json",
        }
        if name.startswith("tags/"):
            rel = f"tags/{name.split('/', 1)[1]}.tsv"
        elif name in mapping:
            rel = mapping[name]
        else:
            raise UnknownReference("unknown artifact", artifact=name)
        path = self._require_artifact(project_id, rel, name)
        return path.read_bytes()

    # -- occurrence filtering ----------------------------------------------

    def filter_occurrences(self, project_id: str) -> np.ndarray:
        """Retained occurrence ids for clustering, sorted ascending.

        Drops word types rarer than ``min_type_frequency`` (frequency
        counted over the whole corpus, case-sensitive surface forms) and
        keeps at most ``max_occurrences_per_type`` occurrences per type,
        earliest occurrence ids first. Deterministic by construction.
        """
        project = self.get_project(project_id)
        cfg = project.config
        sentences = self.load_sentences(project_id)
        tokens = self.load_tokens(project_id)
        freq = Counter(w for s in sentences for w in s.words)
        kept: List[int] = []
        per_type: Counter = Counter()
        cap = cfg.max_occurrences_per_type
        for tok in tokens:  # manifest order == ascending occurrence_id
            if freq[tok.surface] < cfg.min_type_frequency:
                continue
            if cap is not None and per_type[tok.surface] >= cap:
                continue
            per_type[tok.surface] += 1
            kept.append(tok.occurrence_id)
        if len(kept) < cfg.cluster_count:
            raise InsufficientData(
                "fewer retained occurrences than requested clusters",
                retained=len(kept),
                cluster_count=cfg.cluster_count,
            )
        return np.asarray(kept, dtype=np.int64)

    # -- derived results -----------------------------------------------------

    def save_cluster_stage(
        self,
        project_id: str,
        retained: np.ndarray,
        dendrogram: Dendrogram,
        concepts: List[Concept],
    ) -> None:
        with self.lock(project_id):
            rdir = self._results_dir(project_id)
            rdir.mkdir(exist_ok=True)
            _atomic_write_json(rdir / "retained.json", {"indices": [int(i) for i in retained]})
            _atomic_write(rdir / "dendrogram.tsv", dendrogram_to_tsv(dendrogram))
            lines = [json.dumps(c.to_dict()) for c in concepts]
            _atomic_write(rdir / "concepts.jsonl", ("\n".join(lines) + "\n").encode())
            cents = np.stack([c.centroid for c in concepts]).astype("<f8")
            _atomic_write(rdir / "centroids.f64", cents.tobytes())
            _atomic_write_json(rdir / "results.json", {"k": cents.shape[0], "d": cents.shape[1]})

    def load_cluster_stage(self, project_id: str):
        rdir = self._results_dir(project_id)
        if not (rdir / "concepts.jsonl").exists():
            raise MissingArtifact("clustering results not available", project_id=project_id)
        retained = np.asarray(
            json.loads((rdir / "retained.json").read_text())["indices"], dtype=np.int64
        )
        dendrogram = dendrogram_from_tsv((rdir / "dendrogram.tsv").read_bytes())
        shape = json.loads((rdir / "results.json").read_text())
        cents = np.frombuffer((rdir / "centroids.f64").read_bytes(), dtype="<f8")
        cents = cents.reshape(shape["k"], shape["d"])
        concepts = []
        for line in (rdir / "concepts.jsonl").read_text().splitlines():
            d = json.loads(line)
            cid = int(d["concept_id"])
            concepts.append(
                Concept(
                    concept_id=cid,
                    member_occurrences=[int(i) for i in d["member_occurrences"]],
                    centroid=cents[cid].copy(),
                    size=int(d["size"]),
                )
            )
        return retained, dendrogram, concepts

    def save_align_stage(
        self,
        project_id: str,
        alignments: List[ConceptAlignment],
        coverage: Dict[str, float],
        labels: Dict[int, ConceptLabel],
    ) -> None:
        with self.lock(project_id):
            rdir = self._results_dir(project_id)
            rdir.mkdir(exist_ok=True)
            align_lines = [
                json.dumps(
                    {
                        "concept_id": a.concept_id,
                        "tagset": a.tagset_name,
                        "tag": a.tag,
                        "score": a.score,
                    }
                )
                for a in alignments
            ]
            _atomic_write(
                rdir / "alignments.jsonl",
                (("\n".join(align_lines) + "\n") if align_lines else "").encode(),
            )
            _atomic_write_json(rdir / "coverage.json", coverage)
            _atomic_write_json(
                rdir / "labels.json",
                {
                    str(cid): {"auto_label": l.auto_label, "user_label": l.user_label}
                    for cid, l in labels.items()
                },
            )

    def load_align_stage(self, project_id: str):
        rdir = self._results_dir(project_id)
        if not (rdir / "labels.json").exists():
            raise MissingArtifact("alignment results not available", project_id=project_id)
        alignments = []
        for line in (rdir / "alignments.jsonl").read_text().splitlines():
            d = json.loads(line)
            alignments.append(
                ConceptAlignment(
                    concept_id=int(d["concept_id"]),
                    tagset_name=d["tagset"],
                    tag=d["tag"],
                    score=float(d["score"]),
                )
            )
        coverage = json.loads((rdir / "coverage.json").read_text())
        labels = {
            int(cid): ConceptLabel(int(cid), v["auto_label"], v.get("user_label"))
            for cid, v in json.loads((rdir / "labels.json").read_text()).items()
        }
        return alignments, coverage, labels

    def save_score_stage(
        self,
        project_id: str,
        affinities: Dict[int, ClassAffinity],
        relevance: Dict[int, ConceptRelevance],
        overview: OverviewStats,
    ) -> None:
        with self.lock(project_id):
            rdir = self._results_dir(project_id)
            rdir.mkdir(exist_ok=True)
            _atomic_write_json(
                rdir / "affinities.json",
                {
                    str(cid): {
                        "distribution": a.distribution,
                        "dominant_class": a.dominant_class,
                        "purity": a.purity,
                    }
                    for cid, a in affinities.items()
                },
            )
            _atomic_write_json(
                rdir / "relevance.json",
                {
                    str(cid): {
                        "relevance": r.relevance,
                        "supporting_occurrence_count": r.supporting_occurrence_count,
                    }
                    for cid, r in relevance.items()
                },
            )
            _atomic_write_json(
                rdir / "overview.json",
                {
                    "concept_count": overview.concept_count,
                    "alignment_coverage": overview.alignment_coverage,
                    "size_histogram": {
                        "edges": [
                            e if e != float("inf") else None for e in overview.histogram_edges
                        ],
                        "counts": overview.histogram_counts,
                    },
                    "top_salient_concepts": overview.top_salient_concepts,
                    "class_distribution": overview.class_distribution,
                },
            )

    def save_results(self, project_id: str, results: PipelineResults) -> None:
        self.save_cluster_stage(
            project_id, results.retained, results.dendrogram, results.concepts
        )
        self.save_align_stage(project_id, results.alignments, results.coverage, results.labels)
        if results.overview is not None:
            self.save_score_stage(
                project_id, results.affinities, results.relevance, results.overview
            )

    def clear_results(self, project_id: str) -> None:
        rdir = self._results_dir(project_id)
        if rdir.is_dir():
            for child in rdir.iterdir():
                child.unlink()

    def has_results(self, project_id: str) -> bool:
        # overview.json is written by the last stage, so it doubles as the
        # results-complete marker.
        return (self._results_dir(project_id) / "overview.json").exists()

    def load_results(self, project_id: str) -> PipelineResults:
        rdir = self._results_dir(project_id)
        if not self.has_results(project_id):
            self.get_project(project_id)
            raise MissingArtifact("pipeline results not available", project_id=project_id)
        retained, dendrogram, concepts = self.load_cluster_stage(project_id)
        alignments, coverage, labels = self.load_align_stage(project_id)
        affinities = {
            int(cid): ClassAffinity(
                int(cid), v["distribution"], v["dominant_class"], float(v["purity"])
            )
            for cid, v in json.loads((rdir / "affinities.json").read_text()).items()
        }
        relevance = {
            int(cid): ConceptRelevance(
                int(cid), float(v["relevance"]), int(v["supporting_occurrence_count"])
            )
            for cid, v in json.loads((rdir / "relevance.json").read_text()).items()
        }
        overview = None
        if (rdir / "overview.json").exists():
            o = json.loads((rdir / "overview.json").read_text())
            overview = OverviewStats(
                concept_count=o["concept_count"],
                alignment_coverage=o["alignment_coverage"],
                histogram_edges=tuple(
                    float("inf") if e is None else e for e in o["size_histogram"]["edges"]
                ),
                histogram_counts=o["size_histogram"]["counts"],
                top_salient_concepts=o["top_salient_concepts"],
                class_distribution=o["class_distribution"],
            )
        return PipelineResults(
            retained=retained,
            dendrogram=dendrogram,
            concepts=concepts,
            alignments=alignments,
            coverage=coverage,
            labels=labels,
            affinities=affinities,
            relevance=relevance,
            overview=overview,
        )

    def set_user_label(self, project_id: str, concept_id: int, user_label: str) -> ConceptLabel:
        if not user_label or not user_label.strip():
            raise ValidationError("label must be non-empty")
        with self.lock(project_id):
            rdir = self._results_dir(project_id)
            path = rdir / "labels.json"
            if not path.exists():
                raise MissingArtifact("pipeline results not available", project_id=project_id)
            labels = json.loads(path.read_text())
            key = str(concept_id)
            if key not in labels:
                raise UnknownReference("unknown concept", concept_id=concept_id)
            labels[key]["user_label"] = user_label.strip()
            _atomic_write_json(path, labels)
            self._touch(project_id)
            return ConceptLabel(concept_id, labels[key]["auto_label"], user_label.strip())
