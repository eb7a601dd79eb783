"""The command line surface, end to end over a real checkpoint dir."""

import json

import requests
from click.testing import CliRunner

from conceptlens_extractor.cli import main
from conceptlens_extractor.fixtures import toy_corpus

from conftest import create_project


def test_toy_model_extract_attribute_pipeline(tmp_path):
    runner = CliRunner()
    model_dir = tmp_path / "model"
    out_dir = tmp_path / "artifacts"
    corpus = tmp_path / "corpus.txt"
    corpus.write_bytes(toy_corpus(8, seed=2))

    made = runner.invoke(main, ["make-toy-model", str(model_dir)])
    assert made.exit_code == 0, made.output
    assert (model_dir / "model.safetensors").exists()
    assert (model_dir / "tokenizer.json").exists()

    extracted = runner.invoke(
        main,
        [
            "extract",
            "--model",
            str(model_dir),
            "--layer",
            "1",
            "--corpus",
            str(corpus),
            "--out-dir",
            str(out_dir),
        ],
    )
    assert extracted.exit_code == 0, extracted.output
    assert "word vectors" in extracted.output
    meta = json.loads((out_dir / "embeddings.json").read_text())
    assert meta["d"] == 32
    assert (out_dir / "tokens.jsonl").exists()

    attributed = runner.invoke(
        main,
        [
            "attribute",
            "--model",
            str(model_dir),
            "--steps",
            "16",
            "--corpus",
            str(corpus),
            "--out-dir",
            str(out_dir),
        ],
    )
    assert attributed.exit_code == 0, attributed.output
    assert "worst convergence delta" in attributed.output
    lines = (out_dir / "attributions.jsonl").read_bytes().splitlines()
    assert len(lines) == 8


def test_layer_out_of_range_exits_nonzero(tmp_path, toy_checkpoint):
    corpus = tmp_path / "corpus.txt"
    corpus.write_bytes(toy_corpus(2, seed=2))
    result = CliRunner().invoke(
        main,
        [
            "extract",
            "--model",
            str(toy_checkpoint),
            "--layer",
            "5",
            "--corpus",
            str(corpus),
            "--out-dir",
            str(tmp_path / "out"),
        ],
    )
    assert result.exit_code == 1
    assert "layer index beyond model depth" in result.output


def test_push_command_uploads_and_reports(tmp_path, toy_checkpoint, service):
    runner = CliRunner()
    corpus = tmp_path / "corpus.txt"
    corpus.write_bytes(toy_corpus(10, seed=5))
    out_dir = tmp_path / "artifacts"
    for command in (
        ["extract", "--model", str(toy_checkpoint), "--layer", "1"],
        ["attribute", "--model", str(toy_checkpoint), "--steps", "8"],
    ):
        result = runner.invoke(
            main, command + ["--corpus", str(corpus), "--out-dir", str(out_dir)]
        )
        assert result.exit_code == 0, result.output

    project_id = create_project(service)
    pushed = runner.invoke(
        main,
        [
            "push",
            "--endpoint",
            service,
            "--project",
            project_id,
            "--artifact-dir",
            str(out_dir),
        ],
    )
    assert pushed.exit_code == 0, pushed.output
    assert "acknowledged: corpus" in pushed.output
    assert "acknowledged: attributions" in pushed.output
    assert "project state: ACCEPTING_ARTIFACTS" in pushed.output
    exported = requests.get(f"{service}/projects/{project_id}/artifacts/corpus", timeout=10)
    assert exported.content == corpus.read_bytes()


def test_push_unreachable_exits_nonzero(tmp_path, toy_checkpoint):
    corpus = tmp_path / "corpus.txt"
    corpus.write_bytes(toy_corpus(2, seed=2))
    out_dir = tmp_path / "artifacts"
    runner = CliRunner()
    assert (
        runner.invoke(
            main,
            ["extract", "--model", str(toy_checkpoint), "--layer", "0", "--corpus", str(corpus), "--out-dir", str(out_dir)],
        ).exit_code
        == 0
    )
    result = runner.invoke(
        main,
        ["push", "--endpoint", "http://127.0.0.1:9", "--project", "x", "--artifact-dir", str(out_dir)],
    )
    assert result.exit_code == 1
    assert "error" in result.output
