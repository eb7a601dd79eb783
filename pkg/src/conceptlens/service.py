"""REST surface over the project store and pipeline queue.

All routes live under /api/v1. Artifact uploads take raw bytes
(embeddings carry their shape metadata in query parameters), reads are
plain JSON, and every error body is the flat envelope
{"code", "message", "details"}.
"""

from __future__ import annotations

import math
from contextlib import asynccontextmanager
from typing import Optional

import numpy as np
from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response

from .config import JobState, PipelineConfig
from .errors import ConceptLensError, MissingArtifact, UnknownReference, ValidationError
from .explain import explain_sentence
from .pipeline import JobQueue, start_pipeline
from .store import ProjectStore

SORT_KEYS = ("size", "alignment", "class", "relevance")
MAX_PER_PAGE = 500


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _status_body(store: ProjectStore, project_id: str) -> dict:
    status = store.get_status(project_id)
    return {
        "project_id": project_id,
        "state": status.state.value,
        "progress": status.progress,
        "failure_reason": status.failure_reason,
    }


def _require_ready(store: ProjectStore, project_id: str) -> None:
    store.require_state(project_id, JobState.READY)


def _paginate(rows: list, page: int, per_page: int) -> list:
    start = (page - 1) * per_page
    return rows[start : start + per_page]


def _concept_rows(store: ProjectStore, project_id: str, tagset_filter: Optional[str]):
    results = store.load_results(project_id)
    by_concept: dict = {}
    for a in results.alignments:
        if tagset_filter is not None and a.tagset_name != tagset_filter:
            continue
        current = by_concept.get(a.concept_id)
        if current is None or (-a.score, a.tagset_name, a.tag) < (
            -current.score,
            current.tagset_name,
            current.tag,
        ):
            by_concept[a.concept_id] = a
    rows = []
    for c in results.concepts:
        if tagset_filter is not None and c.concept_id not in by_concept:
            continue
        best = by_concept.get(c.concept_id)
        affinity = results.affinities.get(c.concept_id)
        rel = results.relevance.get(c.concept_id)
        label = results.labels.get(c.concept_id)
        rows.append(
            {
                "concept_id": c.concept_id,
                "label": label.display if label else "",
                "size": c.size,
                "alignment": (
                    {"tagset": best.tagset_name, "tag": best.tag, "score": best.score}
                    if best
                    else None
                ),
                "purity": affinity.purity if affinity else None,
                "dominant_class": affinity.dominant_class if affinity else None,
                "relevance": rel.relevance if rel else 0.0,
            }
        )
    return rows, results


def _sort_rows(rows: list, sort_key: str, sort_order: str) -> list:
    def key_of(row):
        if sort_key == "size":
            return row["size"]
        if sort_key == "alignment":
            return row["alignment"]["score"] if row["alignment"] else None
        if sort_key == "class":
            return row["purity"]
        return row["relevance"]

    sign = -1.0 if sort_order == "desc" else 1.0
    # Rows without a sortable value (unaligned / no affinity) go last in
    # either order; ties break by concept_id ascending.
    return sorted(
        rows,
        key=lambda r: (
            1 if key_of(r) is None else 0,
            sign * (key_of(r) or 0.0),
            r["concept_id"],
        ),
    )


def create_app(data_dir: str, workers: Optional[int] = None) -> FastAPI:
    store = ProjectStore(data_dir)
    jobs = JobQueue(store, workers=workers)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        jobs.recover()
        yield
        jobs.shutdown()

    app = FastAPI(title="conceptlens", lifespan=lifespan)
    app.state.store = store
    app.state.jobs = jobs
    prefix = "/api/v1"

    @app.exception_handler(ConceptLensError)
    async def _domain_error(_request: Request, exc: ConceptLensError):
        return JSONResponse(status_code=exc.http_status, content=exc.as_dict())

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "code": "ValidationError",
                "message": "invalid request parameters",
                "details": {"errors": _json_safe(exc.errors())},
            },
        )

    @app.post(prefix + "/projects", status_code=201)
    async def create_project(request: Request):
        body = await request.json()
        if not isinstance(body, dict) or not body.get("name"):
            raise ValidationError("project name is required")
        config = PipelineConfig.from_dict(body.get("config") or {})
        project = store.create_project(body["name"], config)
        return {
            "project_id": project.project_id,
            "name": project.name,
            "state": store.get_status(project.project_id).state.value,
            "config": project.config.to_dict(),
        }

    @app.get(prefix + "/projects")
    def list_projects():
        items = []
        for p in store.list_projects():
            status = store.get_status(p.project_id)
            items.append(
                {"project_id": p.project_id, "name": p.name, "state": status.state.value}
            )
        return {"items": items, "total": len(items)}

    @app.post(prefix + "/projects/{project_id}/artifacts/corpus")
    async def upload_corpus(project_id: str, request: Request):
        count = store.ingest_corpus(project_id, await request.body())
        return {"count": count}

    @app.post(prefix + "/projects/{project_id}/artifacts/tokens")
    async def upload_tokens(project_id: str, request: Request):
        count = store.ingest_tokens(project_id, await request.body())
        return {"count": count}

    @app.post(prefix + "/projects/{project_id}/artifacts/embeddings")
    async def upload_embeddings(
        project_id: str,
        request: Request,
        n: int,
        d: int,
        layer: int = 0,
        model_name: str = "",
        checksum: Optional[str] = None,
    ):
        meta = {"n": n, "d": d, "layer": layer, "model_name": model_name}
        if checksum:
            meta["checksum"] = checksum
        result = store.ingest_embeddings(project_id, meta, await request.body())
        return result

    @app.post(prefix + "/projects/{project_id}/artifacts/tags/{tagset_name}")
    async def upload_tags(project_id: str, tagset_name: str, request: Request):
        count = store.ingest_tags(project_id, tagset_name, await request.body())
        return {"count": count, "tagset": tagset_name}

    @app.post(prefix + "/projects/{project_id}/artifacts/attributions")
    async def upload_attributions(project_id: str, request: Request):
        count = store.ingest_attributions(project_id, await request.body())
        return {"count": count}

    # :path so tagset exports ("tags/<name>") resolve
    @app.get(prefix + "/projects/{project_id}/artifacts/{artifact:path}")
    def export_artifact(project_id: str, artifact: str):
        data = store.export_artifact(project_id, artifact)
        return Response(content=data, media_type="application/octet-stream")

    @app.post(prefix + "/projects/{project_id}/run", status_code=202)
    def run(project_id: str):
        state = start_pipeline(store, project_id, jobs)
        return {"project_id": project_id, "state": state.value}

    @app.get(prefix + "/projects/{project_id}/status")
    def get_status(project_id: str):
        return _status_body(store, project_id)

    @app.get(prefix + "/projects/{project_id}/overview")
    def get_overview(project_id: str):
        _require_ready(store, project_id)
        results = store.load_results(project_id)
        o = results.overview
        return {
            "concept_count": o.concept_count,
            "alignment_coverage": o.alignment_coverage,
            "size_histogram": {
                "edges": [None if e == float("inf") else e for e in o.histogram_edges],
                "counts": o.histogram_counts,
            },
            "top_salient_concepts": o.top_salient_concepts,
            "class_distribution": o.class_distribution,
        }

    @app.get(prefix + "/projects/{project_id}/concepts")
    def list_concepts(
        project_id: str,
        sort: str = Query("size"),
        order: str = Query("desc"),
        page: int = Query(1, ge=1),
        per_page: int = Query(50, ge=1, le=MAX_PER_PAGE),
        tagset: Optional[str] = Query(None),
    ):
        if sort not in SORT_KEYS:
            raise ValidationError("unknown sort key", sort=sort, allowed=list(SORT_KEYS))
        if order not in ("asc", "desc"):
            raise ValidationError("order must be asc or desc", order=order)
        _require_ready(store, project_id)
        rows, _ = _concept_rows(store, project_id, tagset)
        rows = _sort_rows(rows, sort, order)
        return {
            "items": _paginate(rows, page, per_page),
            "total": len(rows),
            "page": page,
            "per_page": per_page,
            "sort_key": sort,
            "sort_order": order,
        }

    @app.get(prefix + "/projects/{project_id}/concepts/{concept_id}")
    def get_concept(project_id: str, concept_id: int):
        _require_ready(store, project_id)
        results = store.load_results(project_id)
        concept = next(
            (c for c in results.concepts if c.concept_id == concept_id), None
        )
        if concept is None:
            raise UnknownReference("unknown concept", concept_id=concept_id)
        sentences = {s.sentence_id: s for s in store.load_sentences(project_id)}
        tokens = {t.occurrence_id: t for t in store.load_tokens(project_id)}
        members = []
        for occ in concept.member_occurrences:
            tok = tokens[occ]
            words = sentences[tok.sentence_id].words
            members.append(
                {
                    "occurrence_id": occ,
                    "sentence_id": tok.sentence_id,
                    "position": tok.position,
                    "surface": tok.surface,
                    "context": {
                        "before": " ".join(words[max(0, tok.position - 5) : tok.position]),
                        "word": tok.surface,
                        "after": " ".join(words[tok.position + 1 : tok.position + 6]),
                    },
                }
            )
        label = results.labels.get(concept_id)
        affinity = results.affinities.get(concept_id)
        rel = results.relevance.get(concept_id)
        return {
            "concept_id": concept_id,
            "size": concept.size,
            "label": {
                "auto_label": label.auto_label if label else "",
                "user_label": label.user_label if label else None,
                "display": label.display if label else "",
            },
            "members": members,
            "alignments": [
                {"tagset": a.tagset_name, "tag": a.tag, "score": a.score}
                for a in results.alignments
                if a.concept_id == concept_id
            ],
            "affinity": (
                {
                    "distribution": affinity.distribution,
                    "dominant_class": affinity.dominant_class,
                    "purity": affinity.purity,
                }
                if affinity
                else None
            ),
            "relevance": rel.relevance if rel else 0.0,
        }

    @app.get(prefix + "/projects/{project_id}/sentences")
    def list_sentences(
        project_id: str,
        page: int = Query(1, ge=1),
        per_page: int = Query(50, ge=1, le=MAX_PER_PAGE),
    ):
        sentences = store.load_sentences(project_id)
        attributions = store.load_attributions(project_id)
        rows = []
        for s in sentences:
            record = attributions.get(s.sentence_id)
            rows.append(
                {
                    "sentence_id": s.sentence_id,
                    "text": s.text,
                    "gold_label": s.gold_label,
                    "predicted_class": record.predicted_class if record else None,
                    "has_attribution": record is not None,
                }
            )
        return {
            "items": _paginate(rows, page, per_page),
            "total": len(rows),
            "page": page,
            "per_page": per_page,
        }

    @app.get(prefix + "/projects/{project_id}/sentences/{sentence_id}/explanation")
    def get_explanation(project_id: str, sentence_id: int):
        _require_ready(store, project_id)
        project = store.get_project(project_id)
        sentences = {s.sentence_id: s for s in store.load_sentences(project_id)}
        if sentence_id not in sentences:
            raise UnknownReference("unknown sentence", sentence_id=sentence_id)
        attribution = store.load_attributions(project_id).get(sentence_id)
        if attribution is None:
            raise MissingArtifact(
                "no attribution record for sentence", sentence_id=sentence_id
            )
        results = store.load_results(project_id)
        tokens = store.load_tokens(project_id)
        occurrence_of = {(t.sentence_id, t.position): t.occurrence_id for t in tokens}
        membership = {
            occ: c.concept_id for c in results.concepts for occ in c.member_occurrences
        }
        embeddings = store.load_embeddings(project_id)
        explanation = explain_sentence(
            sentences[sentence_id],
            attribution,
            occurrence_of,
            membership,
            results.concepts,
            results.labels,
            lambda occ: np.asarray(embeddings[occ], dtype=np.float64),
            project.config.saliency_floor,
        )
        return {
            "sentence_id": explanation.sentence_id,
            "predicted_class": explanation.predicted_class,
            "class_probabilities": explanation.class_probabilities,
            "word_saliencies": [
                {"position": p, "surface": w, "score": s}
                for p, w, s in explanation.word_saliencies
            ],
            "top_word": explanation.top_word,
            "matched_concepts": [
                {
                    "concept_id": m.concept_id,
                    "label": m.label,
                    "trigger_positions": m.trigger_positions,
                    "contribution": m.contribution,
                }
                for m in explanation.matched_concepts
            ],
        }

    @app.patch(prefix + "/projects/{project_id}/concepts/{concept_id}/label")
    async def set_label(project_id: str, concept_id: int, request: Request):
        _require_ready(store, project_id)
        body = await request.json()
        if not isinstance(body, dict) or "label" not in body:
            raise ValidationError("body must contain a label field")
        label = store.set_user_label(project_id, concept_id, body["label"])
        return {
            "concept_id": concept_id,
            "auto_label": label.auto_label,
            "user_label": label.user_label,
            "display": label.display,
        }

    return app
