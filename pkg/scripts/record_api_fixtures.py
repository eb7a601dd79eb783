"""Record REST responses for the planted fixture into JSON files.

Runs the bundled synthetic project through the full pipeline inside a
temporary store, then snapshots a set of API responses keyed by their
request path. Frontend tests replay these instead of talking to a live
service:

    python3 scripts/record_api_fixtures.py --out frontend/fixtures/api.json
"""

import argparse
import json
import tempfile
import time
from pathlib import Path

from fastapi.testclient import TestClient

from conceptlens.config import PipelineConfig
from conceptlens.fixtures import SyntheticSpec, build_synthetic_project
from conceptlens.service import create_app
from conceptlens.store import ProjectStore


def wait_ready(client, pid: str, timeout: float = 120.0) -> None:
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        state = client.get(f"/api/v1/projects/{pid}/status").json()["state"]
        if state == "READY":
            return
        if state == "FAILED":
            raise RuntimeError("fixture pipeline failed")
        time.sleep(0.05)
    raise TimeoutError("fixture pipeline did not settle")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, required=True)
    parser.add_argument("--sentences", type=int, default=200)
    parser.add_argument("--seed", type=int, default=13)
    args = parser.parse_args()

    data = build_synthetic_project(SyntheticSpec(n_sentences=args.sentences, seed=args.seed))
    root = tempfile.mkdtemp(prefix="conceptlens-record-")
    store = ProjectStore(root)
    project = store.create_project(
        "planted", PipelineConfig(cluster_count=8, max_occurrences_per_type=None)
    )
    pid = project.project_id
    store.ingest_corpus(pid, data.corpus)
    store.ingest_tokens(pid, data.tokens)
    store.ingest_embeddings(pid, data.embeddings_meta, data.embeddings)
    for name, blob in data.tagsets.items():
        store.ingest_tags(pid, name, blob)
    store.ingest_attributions(pid, data.attributions)

    recorded = {}
    with TestClient(create_app(root, workers=1)) as client:
        client.post(f"/api/v1/projects/{pid}/run")
        wait_ready(client, pid)

        def snap(path: str) -> dict:
            response = client.get(path)
            if response.status_code != 200:
                raise RuntimeError(f"{path} -> {response.status_code}: {response.text}")
            recorded[path] = response.json()
            return recorded[path]

        snap("/api/v1/projects")
        snap(f"/api/v1/projects/{pid}/status")
        snap(f"/api/v1/projects/{pid}/overview")
        snap(f"/api/v1/projects/{pid}/concepts")
        for sort in ("size", "alignment", "class", "relevance"):
            for order in ("asc", "desc"):
                snap(f"/api/v1/projects/{pid}/concepts?sort={sort}&order={order}")
        overview = recorded[f"/api/v1/projects/{pid}/overview"]
        for tagset in sorted(overview["alignment_coverage"]):
            snap(f"/api/v1/projects/{pid}/concepts?sort=size&order=desc&tagset={tagset}")
        # a mid-listing page so paging deep links can replay
        snap(f"/api/v1/projects/{pid}/concepts?sort=size&order=desc&page=3&per_page=2")
        concepts = recorded[f"/api/v1/projects/{pid}/concepts"]["items"]
        for row in concepts:
            snap(f"/api/v1/projects/{pid}/concepts/{row['concept_id']}")
        page = 1
        while True:
            body = snap(f"/api/v1/projects/{pid}/sentences?page={page}&per_page=50")
            if page * 50 >= body["total"]:
                break
            page += 1
        explained = []
        for sid in range(10):
            body = snap(f"/api/v1/projects/{pid}/sentences/{sid}/explanation")
            explained.append(
                {
                    "sentence_id": sid,
                    "top_word": body["top_word"],
                    "top_surface": body["word_saliencies"][body["top_word"]]["surface"],
                }
            )

    payload = {
        "project_id": pid,
        "known_top_words": explained,
        "responses": recorded,
    }
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    print(f"{args.out}: {len(recorded)} responses, project {pid}")


if __name__ == "__main__":
    main()
