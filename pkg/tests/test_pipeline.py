import pytest

import conceptlens.pipeline as pipeline
from conceptlens.config import JobState
from conceptlens.errors import PreconditionFailed, StateConflict
from conceptlens.pipeline import (
    JobQueue,
    queue_project,
    run_pipeline,
    sentence_label_map,
    start_pipeline,
)
from conceptlens.records import AttributionRecord, SentenceRecord

from conftest import ingest_all, planted_config, run_to_ready


def fresh_project(store, data, **config_overrides):
    pid = store.create_project("run", planted_config(**config_overrides)).project_id
    ingest_all(store, pid, data)
    return pid


class TestHappyPath:
    def test_runs_to_ready(self, store, small_project):
        pid = fresh_project(store, small_project)
        assert run_to_ready(store, pid) is JobState.READY
        status = store.get_status(pid)
        assert status.progress == 1.0
        results = store.load_results(pid)
        assert results.overview.concept_count == 8
        assert sorted(results.coverage) == ["pos", "sem"]
        total = sum(r.relevance for r in results.relevance.values())
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_rerun_on_terminal_state_is_a_no_op(self, store, small_project):
        pid = fresh_project(store, small_project)
        run_to_ready(store, pid)
        before = store.load_results(pid).overview
        assert run_pipeline(store, pid) is JobState.READY
        assert store.load_results(pid).overview.concept_count == before.concept_count

    def test_run_without_queue_rejected(self, store, small_project):
        pid = fresh_project(store, small_project)
        with pytest.raises(StateConflict):
            run_pipeline(store, pid)


class TestQueueing:
    def test_missing_everything(self, store):
        pid = store.create_project("empty").project_id
        with pytest.raises(PreconditionFailed) as err:
            queue_project(store, pid)
        assert err.value.details["missing"] == ["corpus", "tokens", "embeddings"]

    def test_missing_some(self, store, small_project):
        pid = store.create_project("partial").project_id
        store.ingest_corpus(pid, small_project.corpus)
        with pytest.raises(PreconditionFailed) as err:
            queue_project(store, pid)
        assert err.value.details["missing"] == ["tokens", "embeddings"]

    def test_tags_and_attributions_are_optional(self, store, small_project):
        pid = store.create_project("bare", planted_config()).project_id
        store.ingest_corpus(pid, small_project.corpus)
        store.ingest_tokens(pid, small_project.tokens)
        store.ingest_embeddings(pid, small_project.embeddings_meta, small_project.embeddings)
        queue_project(store, pid)
        assert store.get_status(pid).state is JobState.QUEUED

    def test_double_queue_rejected(self, store, small_project):
        pid = fresh_project(store, small_project)
        queue_project(store, pid)
        with pytest.raises(StateConflict):
            queue_project(store, pid)

    def test_requeue_clears_stale_results(self, store, small_project):
        pid = fresh_project(store, small_project)
        run_to_ready(store, pid)
        assert store.has_results(pid)
        # terminal states stay queued-proof as well
        with pytest.raises(StateConflict):
            queue_project(store, pid)


class _Boom(BaseException):
    """Simulated process death: not an Exception, so the pipeline's
    failure handler never sees it and no FAILED state gets written."""


class TestCrashResume:
    @pytest.mark.parametrize(
        "stage_attr, state_at_crash",
        [
            ("_stage_cluster", JobState.CLUSTERING),
            ("_stage_align", JobState.ALIGNING),
            ("_stage_score", JobState.SCORING),
        ],
    )
    def test_resume_after_kill(self, store, small_project, monkeypatch, stage_attr, state_at_crash):
        pid = fresh_project(store, small_project)
        queue_project(store, pid)
        original = getattr(pipeline, stage_attr)
        monkeypatch.setattr(pipeline, stage_attr, lambda *a: (_ for _ in ()).throw(_Boom()))
        with pytest.raises(_Boom):
            run_pipeline(store, pid)
        assert store.get_status(pid).state is state_at_crash
        assert not store.has_results(pid)
        monkeypatch.setattr(pipeline, stage_attr, original)
        assert run_pipeline(store, pid) is JobState.READY
        assert store.has_results(pid)

    def test_resumed_results_match_clean_run(self, store, small_project, monkeypatch):
        clean = store.create_project("clean", planted_config()).project_id
        ingest_all(store, clean, small_project)
        run_to_ready(store, clean)

        crashed = fresh_project(store, small_project)
        queue_project(store, crashed)
        original = pipeline._stage_align
        monkeypatch.setattr(
            pipeline, "_stage_align", lambda *a: (_ for _ in ()).throw(_Boom())
        )
        with pytest.raises(_Boom):
            run_pipeline(store, crashed)
        monkeypatch.setattr(pipeline, "_stage_align", original)
        run_pipeline(store, crashed)

        a = store.load_results(clean)
        b = store.load_results(crashed)
        assert a.dendrogram.merges == b.dendrogram.merges
        assert {c: r.relevance for c, r in a.relevance.items()} == {
            c: r.relevance for c, r in b.relevance.items()
        }
        assert a.coverage == b.coverage


class TestFailure:
    def test_more_clusters_than_occurrences(self, store, small_project):
        pid = fresh_project(store, small_project, cluster_count=100_000)
        queue_project(store, pid)
        assert run_pipeline(store, pid) is JobState.FAILED
        status = store.get_status(pid)
        assert "InsufficientData" in status.failure_reason

    def test_failed_state_is_terminal(self, store, small_project):
        pid = fresh_project(store, small_project, cluster_count=100_000)
        queue_project(store, pid)
        run_pipeline(store, pid)
        with pytest.raises(StateConflict):
            queue_project(store, pid)


class TestDegradation:
    def test_without_tagsets(self, store, small_project):
        pid = store.create_project("no-tags", planted_config()).project_id
        store.ingest_corpus(pid, small_project.corpus)
        store.ingest_tokens(pid, small_project.tokens)
        store.ingest_embeddings(pid, small_project.embeddings_meta, small_project.embeddings)
        store.ingest_attributions(pid, small_project.attributions)
        assert run_to_ready(store, pid) is JobState.READY
        results = store.load_results(pid)
        assert results.coverage == {}
        assert results.alignments == []
        assert all(l.auto_label.startswith("latent:") for l in results.labels.values())

    def test_without_attributions(self, store, small_project):
        pid = store.create_project("no-attr", planted_config()).project_id
        store.ingest_corpus(pid, small_project.corpus)
        store.ingest_tokens(pid, small_project.tokens)
        store.ingest_embeddings(pid, small_project.embeddings_meta, small_project.embeddings)
        for name, blob in small_project.tagsets.items():
            store.ingest_tags(pid, name, blob)
        assert run_to_ready(store, pid) is JobState.READY
        results = store.load_results(pid)
        assert all(r.relevance == 0.0 for r in results.relevance.values())
        assert results.overview.class_distribution == {}
        # gold labels still drive class affinity
        assert results.affinities
        for aff in results.affinities.values():
            assert aff.dominant_class in ("negative", "positive")


class TestLabelMap:
    def test_gold_preferred_over_predicted(self):
        sentences = [
            SentenceRecord(0, "a", ["a"], gold_label="neg"),
            SentenceRecord(1, "b", ["b"], gold_label=None),
            SentenceRecord(2, "c", ["c"], gold_label=None),
        ]
        attributions = {
            0: AttributionRecord(0, "pos", {"pos": 1.0}, [0.1], 0.0),
            1: AttributionRecord(1, "pos", {"pos": 1.0}, [0.1], 0.0),
        }
        labels = sentence_label_map(sentences, attributions)
        assert labels == {0: "neg", 1: "pos"}


class TestJobQueue:
    def test_submit_processes_to_ready(self, store, small_project):
        pid = fresh_project(store, small_project)
        jobs = JobQueue(store, workers=1)
        try:
            assert start_pipeline(store, pid, jobs) is JobState.QUEUED
            jobs.join()
            assert store.get_status(pid).state is JobState.READY
        finally:
            jobs.shutdown()

    def test_recover_reenqueues_interrupted_projects(self, store, small_project):
        pid = fresh_project(store, small_project)
        # simulate a process that died right after queuing
        queue_project(store, pid)
        jobs = JobQueue(store, workers=1)
        try:
            resumed = jobs.recover()
            assert resumed == [pid]
            jobs.join()
            assert store.get_status(pid).state is JobState.READY
        finally:
            jobs.shutdown()

    def test_recover_ignores_settled_projects(self, store, small_project):
        pid = fresh_project(store, small_project)
        run_to_ready(store, pid)
        jobs = JobQueue(store, workers=1)
        try:
            assert jobs.recover() == []
        finally:
            jobs.shutdown()

    def test_worker_survives_bad_submission(self, store, small_project):
        bad = store.create_project("never-queued").project_id
        good = fresh_project(store, small_project)
        jobs = JobQueue(store, workers=1)
        try:
            jobs.submit(bad)  # run_pipeline raises StateConflict inside the worker
            start_pipeline(store, good, jobs)
            jobs.join()
            assert store.get_status(good).state is JobState.READY
            assert store.get_status(bad).state is JobState.ACCEPTING_ARTIFACTS
        finally:
            jobs.shutdown()
