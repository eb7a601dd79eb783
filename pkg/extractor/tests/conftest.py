"""Shared fixtures: toy classifiers and a live analysis service.

The service fixture runs the real server in a subprocess and talks to
it over HTTP only; nothing here imports the service's code.
"""

import socket
import subprocess
import sys
import time

import pytest
import requests
from hypothesis import settings

from conceptlens_extractor.fixtures import (
    build_linear_classifier,
    build_toy_classifier,
    save_toy_classifier,
)

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def toy_model():
    return build_toy_classifier(seed=7)


@pytest.fixture(scope="session")
def linear_model():
    return build_linear_classifier(seed=5)


@pytest.fixture(scope="session")
def toy_checkpoint(tmp_path_factory):
    return save_toy_classifier(tmp_path_factory.mktemp("toy-model"), seed=7)


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


@pytest.fixture(scope="session")
def service(tmp_path_factory):
    """Base URL of a live analysis service backed by a temp data dir."""
    data_dir = tmp_path_factory.mktemp("service-data")
    log_file = tmp_path_factory.mktemp("service-log") / "server.log"
    port = _free_port()
    with log_file.open("wb") as log:
        proc = subprocess.Popen(
            [
                sys.executable,
                "-m",
                "conceptlens.cli",
                "serve",
                "--data-dir",
                str(data_dir),
                "--port",
                str(port),
            ],
            stdout=log,
            stderr=subprocess.STDOUT,
        )
        base = f"http://127.0.0.1:{port}/api/v1"
        try:
            deadline = time.monotonic() + 30
            while True:
                try:
                    if requests.get(f"{base}/projects", timeout=2).ok:
                        break
                except requests.ConnectionError:
                    pass
                if time.monotonic() > deadline:
                    raise RuntimeError(f"service did not come up; log: {log_file}")
                time.sleep(0.1)
            yield base
        finally:
            proc.terminate()
            proc.wait(timeout=10)


def create_project(base: str, cluster_count: int = 4) -> str:
    resp = requests.post(
        f"{base}/projects",
        json={
            "name": "extractor-test",
            "config": {"cluster_count": cluster_count, "max_occurrences_per_type": None},
        },
        timeout=10,
    )
    resp.raise_for_status()
    return resp.json()["project_id"]
