"""Command line interface.

    conceptlens-extract make-toy-model DIR
    conceptlens-extract extract --model DIR --layer 1 --corpus c.txt --out-dir art/
    conceptlens-extract attribute --model DIR --steps 128 --corpus c.txt --out-dir art/
    conceptlens-extract push --endpoint http://host:8000/api/v1 --project ID --artifact-dir art/
"""

from __future__ import annotations

import logging
import sys

import click

from .attribute import run_attribution
from .config import ExtractionConfig
from .errors import ExtractorError
from .extract import run_extraction
from .fixtures import save_toy_classifier
from .push import push_artifacts


@click.group()
def main():
    """Extract transformer artifacts and push them to an analysis service."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


def _fail(exc: ExtractorError):
    click.echo(f"error: {exc}", err=True)
    sys.exit(1)


@main.command("make-toy-model")
@click.argument("target", type=click.Path(file_okay=False))
@click.option("--seed", default=7, show_default=True)
def make_toy_model(target, seed):
    """Write the bundled 2-layer toy classifier checkpoint to TARGET."""
    path = save_toy_classifier(target, seed=seed)
    click.echo(f"toy classifier written to {path}")


@main.command()
@click.option("--model", required=True, help="Model name or checkpoint directory.")
@click.option("--layer", default=0, show_default=True, help="Encoder block index, 0-based.")
@click.option("--corpus", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option("--batch-size", default=16, show_default=True)
@click.option("--device", default="cpu", show_default=True)
def extract(model, layer, corpus, out_dir, batch_size, device):
    """Extract word embeddings and the token manifest."""
    config = ExtractionConfig(model=model, layer=layer, batch_size=batch_size, device=device)
    try:
        result = run_extraction(config, corpus, out_dir)
    except ExtractorError as exc:
        _fail(exc)
    click.echo(
        f"extracted {result.matrix.shape[0]} word vectors (d={result.matrix.shape[1]}) "
        f"from {len(result.sentences)} sentences, {len(result.skipped)} skipped"
    )


@main.command()
@click.option("--model", required=True, help="Model name or checkpoint directory.")
@click.option("--steps", default=128, show_default=True, help="Integration steps m.")
@click.option("--corpus", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option(
    "--baseline",
    default="zero-embedding",
    show_default=True,
    type=click.Choice(["zero-embedding", "pad-token"]),
)
@click.option("--batch-size", default=16, show_default=True)
@click.option("--device", default="cpu", show_default=True)
def attribute(model, steps, corpus, out_dir, baseline, batch_size, device):
    """Write integrated-gradients attributions for every sentence."""
    config = ExtractionConfig(
        model=model, ig_steps=steps, baseline=baseline, batch_size=batch_size, device=device
    )
    try:
        records = run_attribution(config, corpus, out_dir)
    except ExtractorError as exc:
        _fail(exc)
    worst = max((r["convergence_delta"] for r in records), default=0.0)
    click.echo(f"attributed {len(records)} sentences, worst convergence delta {worst:.3e}")


@main.command()
@click.option("--endpoint", required=True, help="Service base URL, e.g. http://host:8000/api/v1.")
@click.option("--project", required=True, help="Target project id.")
@click.option(
    "--artifact-dir",
    default=".",
    show_default=True,
    type=click.Path(exists=True, file_okay=False),
)
def push(endpoint, project, artifact_dir):
    """Upload all artifacts in a directory to a project."""
    try:
        report = push_artifacts(endpoint, project, artifact_dir)
    except ExtractorError as exc:
        _fail(exc)
    for artifact in report.acknowledged:
        click.echo(f"acknowledged: {artifact}")
    if report.project_state:
        click.echo(f"project state: {report.project_state}")


if __name__ == "__main__":
    main()
