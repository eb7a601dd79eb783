"""Pipeline orchestration: drives a project from QUEUED to READY.

Stages persist their outputs before the state advances, so a process
killed mid-run can resume from the stage recorded in the durable state
file. READY is only entered after the final stage's files are on disk;
readers therefore never observe partial results.

Degradation rules when optional artifacts are absent:
- no tagsets: empty alignment table, all labels "latent:...".
- no attributions: relevance 0 for every concept, empty class
  distribution; class affinity falls back to gold labels alone, and
  concepts whose members have no label of either kind simply carry no
  affinity entry.
"""

from __future__ import annotations

import logging
import os
import queue
import threading
from typing import Dict, List, Optional

import numpy as np

from .align import align_all, class_affinity, generate_label
from .cluster import ward_cluster
from .config import ACTIVE_STATES, JobState
from .errors import ConceptLensError, MissingLabels, PreconditionFailed, StateConflict
from .explain import concept_relevance, overview
from .records import AttributionRecord, SentenceRecord
from .store import ProjectStore

log = logging.getLogger("conceptlens.pipeline")

REQUIRED_ARTIFACTS = ("corpus", "tokens", "embeddings")


def sentence_label_map(
    sentences: List[SentenceRecord], attributions: Dict[int, AttributionRecord]
) -> Dict[int, str]:
    """Gold label where present, else the predicted class."""
    labels: Dict[int, str] = {}
    for s in sentences:
        if s.gold_label is not None:
            labels[s.sentence_id] = s.gold_label
        elif s.sentence_id in attributions:
            labels[s.sentence_id] = attributions[s.sentence_id].predicted_class
    return labels


def _stage_cluster(store: ProjectStore, project_id: str) -> None:
    project = store.get_project(project_id)
    retained = store.filter_occurrences(project_id)
    embeddings = store.load_embeddings(project_id)
    matrix = np.ascontiguousarray(embeddings[retained])
    dendrogram, concepts = ward_cluster(
        matrix, project.config.cluster_count, row_ids=retained
    )
    store.save_cluster_stage(project_id, retained, dendrogram, concepts)


def _stage_align(store: ProjectStore, project_id: str) -> None:
    project = store.get_project(project_id)
    _, _, concepts = store.load_cluster_stage(project_id)
    annotations = store.load_all_tags(project_id)
    table, coverage = align_all(concepts, annotations, project.config.alignment_threshold)
    surface = {t.occurrence_id: t.surface for t in store.load_tokens(project_id)}
    labels = {c.concept_id: generate_label(c, table, surface) for c in concepts}
    store.save_align_stage(project_id, table, coverage, labels)


def _stage_score(store: ProjectStore, project_id: str) -> None:
    _, _, concepts = store.load_cluster_stage(project_id)
    _, coverage, labels = store.load_align_stage(project_id)
    tokens = store.load_tokens(project_id)
    sentences = store.load_sentences(project_id)
    attributions = store.load_attributions(project_id)
    label_map = sentence_label_map(sentences, attributions)
    occurrence_sentence = {t.occurrence_id: t.sentence_id for t in tokens}
    affinities = {}
    for concept in concepts:
        try:
            affinities[concept.concept_id] = class_affinity(
                concept, label_map, occurrence_sentence
            )
        except MissingLabels:
            continue
    occurrence_of = {(t.sentence_id, t.position): t.occurrence_id for t in tokens}
    membership = {
        occ: c.concept_id for c in concepts for occ in c.member_occurrences
    }
    relevance_rows = concept_relevance(concepts, attributions, occurrence_of, membership)
    relevance = {r.concept_id: r for r in relevance_rows}
    stats = overview(concepts, coverage, relevance_rows, labels, attributions)
    store.save_score_stage(project_id, affinities, relevance, stats)


def run_pipeline(store: ProjectStore, project_id: str) -> JobState:
    """Advance the project from its current stage to READY (or FAILED).

    Entered with state QUEUED for fresh runs; entering with CLUSTERING,
    ALIGNING or SCORING resumes an interrupted run at that stage.
    """
    state = store.get_status(project_id).state
    if state in (JobState.READY, JobState.FAILED):
        return state
    if state not in ACTIVE_STATES:
        raise StateConflict(
            "pipeline has not been started", project_id=project_id, state=state.value
        )
    try:
        if state == JobState.QUEUED:
            store.set_state(project_id, JobState.CLUSTERING)
            state = JobState.CLUSTERING
        if state == JobState.CLUSTERING:
            _stage_cluster(store, project_id)
            store.set_state(project_id, JobState.ALIGNING)
            state = JobState.ALIGNING
        if state == JobState.ALIGNING:
            _stage_align(store, project_id)
            store.set_state(project_id, JobState.SCORING)
            state = JobState.SCORING
        if state == JobState.SCORING:
            _stage_score(store, project_id)
            store.set_state(project_id, JobState.READY)
        return JobState.READY
    except ConceptLensError as exc:
        log.warning("pipeline failed for %s: %s", project_id, exc)
        store.set_state(
            project_id, JobState.FAILED, failure_reason=f"{exc.code}: {exc.message}"
        )
        return JobState.FAILED
    except Exception as exc:  # pragma: no cover - unexpected defects
        log.exception("pipeline crashed for %s", project_id)
        store.set_state(project_id, JobState.FAILED, failure_reason=repr(exc))
        return JobState.FAILED


def queue_project(store: ProjectStore, project_id: str) -> None:
    """Validate artifacts and mark the project QUEUED."""
    present = store.artifacts_present(project_id)
    missing = [name for name in REQUIRED_ARTIFACTS if not present.get(name)]
    if missing:
        raise PreconditionFailed("required artifacts are missing", missing=missing)
    with store.lock(project_id):
        store.require_state(project_id, JobState.ACCEPTING_ARTIFACTS)
        store.clear_results(project_id)
        store.set_state(project_id, JobState.QUEUED)


def start_pipeline(store: ProjectStore, project_id: str, job_queue: "JobQueue") -> JobState:
    """Validate artifacts, mark the project QUEUED, hand it to a worker."""
    queue_project(store, project_id)
    job_queue.submit(project_id)
    return JobState.QUEUED


class JobQueue:
    """Global worker pool; one pipeline run executes on one worker."""

    def __init__(self, store: ProjectStore, workers: Optional[int] = None):
        if workers is None:
            workers = max(1, (os.cpu_count() or 2) // 2)
        self._store = store
        self._queue: "queue.Queue[Optional[str]]" = queue.Queue()
        self._threads = [
            threading.Thread(target=self._worker, name=f"pipeline-{i}", daemon=True)
            for i in range(workers)
        ]
        for t in self._threads:
            t.start()

    def _worker(self) -> None:
        while True:
            project_id = self._queue.get()
            if project_id is None:
                self._queue.task_done()
                return
            try:
                run_pipeline(self._store, project_id)
            except Exception:  # pragma: no cover - worker must survive
                log.exception("worker error on %s", project_id)
            finally:
                self._queue.task_done()

    def submit(self, project_id: str) -> None:
        self._queue.put(project_id)

    def recover(self) -> List[str]:
        """Re-enqueue projects that were mid-run when the process died."""
        resumed = []
        for project in self._store.list_projects():
            state = self._store.get_status(project.project_id).state
            if state in ACTIVE_STATES:
                self.submit(project.project_id)
                resumed.append(project.project_id)
        return resumed

    def join(self) -> None:
        self._queue.join()

    def shutdown(self) -> None:
        for _ in self._threads:
            self._queue.put(None)
        for t in self._threads:
            t.join(timeout=5)
