import pytest
from hypothesis import HealthCheck, settings

from conceptlens.config import PipelineConfig
from conceptlens.fixtures import SyntheticProject, SyntheticSpec, build_synthetic_project
from conceptlens.pipeline import queue_project, run_pipeline
from conceptlens.store import ProjectStore

settings.register_profile(
    "suite", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("suite")


def ingest_all(store: ProjectStore, project_id: str, data: SyntheticProject) -> None:
    store.ingest_corpus(project_id, data.corpus)
    store.ingest_tokens(project_id, data.tokens)
    store.ingest_embeddings(project_id, data.embeddings_meta, data.embeddings)
    for name, blob in data.tagsets.items():
        store.ingest_tags(project_id, name, blob)
    store.ingest_attributions(project_id, data.attributions)


def run_to_ready(store: ProjectStore, project_id: str):
    queue_project(store, project_id)
    return run_pipeline(store, project_id)


@pytest.fixture
def store(tmp_path):
    return ProjectStore(tmp_path / "data")


@pytest.fixture(scope="session")
def planted_project() -> SyntheticProject:
    """The bundled end-to-end fixture: 200 sentences, 2 classes, 8
    planted Gaussian concepts in 32 dimensions."""
    return build_synthetic_project(SyntheticSpec())


@pytest.fixture(scope="session")
def small_project() -> SyntheticProject:
    return build_synthetic_project(SyntheticSpec(n_sentences=60, seed=3))


def planted_config(**overrides) -> PipelineConfig:
    base = dict(cluster_count=8, max_occurrences_per_type=None)
    base.update(overrides)
    return PipelineConfig(**base)


@pytest.fixture(scope="session")
def ready_store(tmp_path_factory, planted_project):
    """A store holding the planted fixture already run to READY."""
    root = tmp_path_factory.mktemp("ready-store")
    store = ProjectStore(root)
    project = store.create_project("planted", planted_config())
    ingest_all(store, project.project_id, planted_project)
    state = run_to_ready(store, project.project_id)
    assert state.value == "READY"
    return store, project.project_id
