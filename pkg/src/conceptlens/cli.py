"""Command line entry points.

serve      start the REST service over a data directory
run        advance one queued or interrupted project (worker process)
run-local  ingest an artifact directory, run the pipeline synchronously,
           and emit the same JSON the API serves
make-fixture  write a seeded synthetic artifact directory
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

import click

from .config import JobState, PipelineConfig
from .errors import ConceptLensError
from .pipeline import queue_project, run_pipeline
from .store import ProjectStore

DATA_DIR_ENV = "CONCEPTLENS_DATA_DIR"


@click.group()
def main() -> None:
    """Latent-concept analysis over transformer representations."""


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option(
    "--data-dir",
    envvar=DATA_DIR_ENV,
    required=True,
    type=click.Path(file_okay=False),
    help=f"Project storage root (or ${DATA_DIR_ENV}).",
)
@click.option("--workers", default=None, type=int, help="Pipeline worker threads.")
def serve(host: str, port: int, data_dir: str, workers: int | None) -> None:
    """Serve the REST API."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(data_dir, workers=workers), host=host, port=port)


@main.command()
@click.option("--data-dir", envvar=DATA_DIR_ENV, required=True, type=click.Path(file_okay=False))
@click.option("--project-id", required=True)
def run(data_dir: str, project_id: str) -> None:
    """Run one project's pipeline in this process (QUEUED or resumable)."""
    store = ProjectStore(data_dir)
    state = run_pipeline(store, project_id)
    click.echo(state.value)
    if state is not JobState.READY:
        sys.exit(1)


def _ingest_artifact_dir(store: ProjectStore, project_id: str, artifact_dir: Path) -> None:
    store.ingest_corpus(project_id, (artifact_dir / "corpus.txt").read_bytes())
    store.ingest_tokens(project_id, (artifact_dir / "tokens.tsv").read_bytes())
    meta = json.loads((artifact_dir / "embeddings.json").read_text())
    store.ingest_embeddings(project_id, meta, (artifact_dir / "embeddings.f32").read_bytes())
    for tags_path in sorted(artifact_dir.glob("tags.*.tsv")):
        tagset = tags_path.name[len("tags.") : -len(".tsv")]
        store.ingest_tags(project_id, tagset, tags_path.read_bytes())
    attr_path = artifact_dir / "attributions.jsonl"
    if attr_path.exists():
        store.ingest_attributions(project_id, attr_path.read_bytes())


@main.command("run-local")
@click.argument("artifact_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--data-dir", envvar=DATA_DIR_ENV, default=None, type=click.Path(file_okay=False))
@click.option("--name", default="local")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def run_local(artifact_dir: Path, data_dir: str | None, name: str, output: str | None) -> None:
    """Run the full pipeline over ARTIFACT_DIR and emit result JSON.

    The directory must contain corpus.txt, tokens.tsv, embeddings.json,
    embeddings.f32, and may contain tags.<name>.tsv files,
    attributions.jsonl, and config.json.
    """
    from .service import _concept_rows, _sort_rows

    if data_dir is None:
        data_dir = tempfile.mkdtemp(prefix="conceptlens-local-")
    store = ProjectStore(data_dir)
    config = PipelineConfig()
    config_path = artifact_dir / "config.json"
    if config_path.exists():
        config = PipelineConfig.from_dict(json.loads(config_path.read_text()))
    try:
        project = store.create_project(name, config)
        pid = project.project_id
        _ingest_artifact_dir(store, pid, artifact_dir)
        queue_project(store, pid)
        state = run_pipeline(store, pid)
        status = store.get_status(pid)
        if state is not JobState.READY:
            click.echo(
                json.dumps({"state": state.value, "failure_reason": status.failure_reason}),
                err=True,
            )
            sys.exit(1)
        results = store.load_results(pid)
        rows, _ = _concept_rows(store, pid, None)
        rows = _sort_rows(rows, "size", "desc")
        o = results.overview
        payload = {
            "project_id": pid,
            "state": state.value,
            "overview": {
                "concept_count": o.concept_count,
                "alignment_coverage": o.alignment_coverage,
                "size_histogram": {
                    "edges": [None if e == float("inf") else e for e in o.histogram_edges],
                    "counts": o.histogram_counts,
                },
                "top_salient_concepts": o.top_salient_concepts,
                "class_distribution": o.class_distribution,
            },
            "concepts": rows,
        }
    except ConceptLensError as exc:
        click.echo(json.dumps(exc.as_dict()), err=True)
        sys.exit(1)
    text = json.dumps(payload, indent=1)
    if output:
        Path(output).write_text(text + "\n")
    else:
        click.echo(text)


@main.command("make-fixture")
@click.argument("target", type=click.Path(file_okay=False, path_type=Path))
@click.option("--sentences", default=200, show_default=True, type=int)
@click.option("--concepts", default=8, show_default=True, type=int)
@click.option("--dim", default=32, show_default=True, type=int)
@click.option("--seed", default=13, show_default=True, type=int)
def make_fixture(target: Path, sentences: int, concepts: int, dim: int, seed: int) -> None:
    """Write a synthetic artifact directory to TARGET."""
    from .fixtures import SyntheticSpec, build_synthetic_project, write_artifact_dir

    spec = SyntheticSpec(n_sentences=sentences, n_concepts=concepts, dim=dim, seed=seed)
    write_artifact_dir(build_synthetic_project(spec), target)
    click.echo(str(target))


if __name__ == "__main__":
    main()
