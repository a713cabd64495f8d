from __future__ import annotations

import sys
from pathlib import Path

import pytest

from vulngraph.embedding import EmbeddingCache
from vulngraph.graph import GraphStore
from vulngraph.pipeline import (
    EmbeddingService,
    PipelineConfig,
    PipelineState,
    SourceConfig,
    run_full,
)

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES = REPO_ROOT / "fixtures" / "eternalblue"

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def fixture_dir() -> Path:
    return FIXTURES


def make_config(tmp_path: Path, fixtures: Path = FIXTURES, **overrides) -> PipelineConfig:
    config = PipelineConfig(
        store_path=str(tmp_path / "store"),
        sources=[
            SourceConfig("NVD", str(fixtures / "nvd.ndjson")),
            SourceConfig("CWE", str(fixtures / "cwe.ndjson")),
            SourceConfig("CVE_DETAILS", str(fixtures / "cvedetails.ndjson")),
            SourceConfig("EXPLOITDB", str(fixtures / "exploitdb.csv")),
        ],
    )
    for name, value in overrides.items():
        setattr(config, name, value)
    return config


def run_pipeline(config: PipelineConfig, with_embeddings: bool = False):
    store = GraphStore.open(config.store_path)
    state = PipelineState.load(config.state_path)
    embedder = None
    if with_embeddings:
        embedder = EmbeddingService(
            EmbeddingCache(config.embedding_cache_dir,
                           alpha=config.embedding.alpha,
                           beta=config.embedding.beta),
            config.embedding.models)
    reports = run_full(config, state, store, embedder)
    return store, state, reports


@pytest.fixture
def eternalblue_store(tmp_path):
    """Store loaded from the bundled case-study corpus."""
    store, _, _ = run_pipeline(make_config(tmp_path))
    return store


def make_tier_cache(root: Path, n: int = 150, alpha: int = 32, beta: int = 128,
                    year: int = 2020, model: str = "HASH_DEFAULT", seed: int = 0):
    """Tier cache over synthetic hash-embedded texts."""
    import numpy as np

    cache = EmbeddingCache(root, alpha=alpha, beta=beta)
    rng = np.random.default_rng(seed)
    words = ["alpha", "beta", "gamma", "delta", "overflow", "kernel", "auth"]
    ids = [f"CVE-{year}-{1000 + i}" for i in range(n)]
    texts = [" ".join(rng.choice(words, size=6)) + f" case{i}" for i in range(n)]
    tiers = cache.build(year, model, ids, texts)
    return cache, tiers


def store_fingerprint(store: GraphStore) -> dict:
    """Counts plus key sets plus properties; equal iff stores are isomorphic."""
    nodes = {
        (n.label, n.key): tuple(sorted((k, repr(v)) for k, v in n.props.items()))
        for n in store.all_nodes()
    }
    node_of = {n.id: (n.label, n.key) for n in store.all_nodes()}
    edges = {
        (e.etype, node_of[e.src], node_of[e.dst]):
            tuple(sorted((k, repr(v)) for k, v in e.props.items()))
        for e in store.all_edges()
    }
    return {"counts": store.counts(), "nodes": nodes, "edges": edges}
