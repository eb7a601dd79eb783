"""Upload client for the analysis service's artifact endpoints.

Walks an artifact directory, posts each file to its ingestion route in
dependency order (corpus first, attributions last, matching the
server's replace cascade), and retries transport failures and 5xx
responses with bounded exponential backoff. A 4xx response is a
contract violation and surfaces immediately with the server's error
envelope.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import requests

from .errors import PushError

log = logging.getLogger(__name__)

TOKENS_FILES = ("tokens.jsonl", "tokens.tsv")


@dataclass
class PushReport:
    acknowledged: Dict[str, dict] = field(default_factory=dict)
    project_state: Optional[str] = None


def _collect(artifact_dir: Path) -> List[Tuple[str, Path, dict]]:
    """(route suffix, file, query params) per present artifact, in push order."""
    plan: List[Tuple[str, Path, dict]] = []
    corpus = artifact_dir / "corpus.txt"
    if corpus.exists():
        plan.append(("corpus", corpus, {}))
    for name in TOKENS_FILES:
        tokens = artifact_dir / name
        if tokens.exists():
            plan.append(("tokens", tokens, {}))
            break
    meta_file = artifact_dir / "embeddings.json"
    buffer_file = artifact_dir / "embeddings.f32"
    if meta_file.exists() and buffer_file.exists():
        meta = json.loads(meta_file.read_text())
        params = {k: meta[k] for k in ("n", "d", "layer", "model_name") if k in meta}
        if meta.get("checksum"):
            params["checksum"] = meta["checksum"]
        plan.append(("embeddings", buffer_file, params))
    for tag_file in sorted(artifact_dir.glob("tags.*.tsv")):
        tagset = tag_file.name[len("tags.") : -len(".tsv")]
        plan.append((f"tags/{tagset}", tag_file, {}))
    attributions = artifact_dir / "attributions.jsonl"
    if attributions.exists():
        plan.append(("attributions", attributions, {}))
    return plan


def _post_with_retry(
    session: requests.Session,
    url: str,
    params: dict,
    body: bytes,
    *,
    artifact: str,
    max_attempts: int,
    base_delay: float,
    max_delay: float,
    sleep: Callable[[float], None],
) -> dict:
    delay = base_delay
    last_error = None
    for attempt in range(1, max_attempts + 1):
        try:
            resp = session.post(
                url,
                params=params,
                data=body,
                headers={"content-type": "application/octet-stream"},
                timeout=60,
            )
        except (requests.ConnectionError, requests.Timeout) as exc:
            last_error = f"{type(exc).__name__}: {exc}"
            log.warning("upload of %s failed (attempt %d/%d): %s", artifact, attempt, max_attempts, last_error)
        else:
            if resp.status_code < 400:
                return resp.json()
            if resp.status_code < 500:
                try:
                    envelope = resp.json()
                except ValueError:
                    envelope = {"message": resp.text}
                raise PushError(
                    "server rejected artifact",
                    artifact=artifact,
                    status=resp.status_code,
                    code=envelope.get("code"),
                    server_message=envelope.get("message"),
                    server_details=envelope.get("details"),
                )
            last_error = f"HTTP {resp.status_code}"
            log.warning("upload of %s got %s (attempt %d/%d)", artifact, last_error, attempt, max_attempts)
        if attempt < max_attempts:
            sleep(min(delay, max_delay))
            delay *= 2
    raise PushError(
        "artifact upload failed after retries",
        artifact=artifact,
        attempts=max_attempts,
        last_error=last_error,
    )


def push_artifacts(
    endpoint: str,
    project_id: str,
    artifact_dir,
    *,
    max_attempts: int = 5,
    base_delay: float = 0.25,
    max_delay: float = 4.0,
    sleep: Callable[[float], None] = time.sleep,
    session: Optional[requests.Session] = None,
) -> PushReport:
    """Push every artifact found under ``artifact_dir``.

    ``endpoint`` is the service base, e.g. http://host:8000/api/v1.
    Re-pushing is safe: the server replaces prior uploads and drops
    their dependents.
    """
    artifact_dir = Path(artifact_dir)
    plan = _collect(artifact_dir)
    if not plan:
        raise PushError("no artifacts found", directory=str(artifact_dir))
    base = endpoint.rstrip("/")
    own_session = session is None
    session = session or requests.Session()
    report = PushReport()
    try:
        for artifact, path, params in plan:
            url = f"{base}/projects/{project_id}/artifacts/{artifact}"
            report.acknowledged[artifact] = _post_with_retry(
                session,
                url,
                params,
                path.read_bytes(),
                artifact=artifact,
                max_attempts=max_attempts,
                base_delay=base_delay,
                max_delay=max_delay,
                sleep=sleep,
            )
            log.info("pushed %s from %s", artifact, path.name)
        try:
            status = session.get(f"{base}/projects/{project_id}/status", timeout=60)
            if status.status_code < 400:
                report.project_state = status.json().get("state")
        except requests.RequestException:
            pass
    finally:
        if own_session:
            session.close()
    return report
