"""Regenerates the frontend test fixtures through the real API.

Run from the repo root (requires the Python package installed):

    python frontend/scripts/make_fixtures.py

Produces, under frontend/tests/fixtures/:
  - parity.json: a browser-origin embedding payload (light tier, 100x32)
    together with the server's API-origin reduction of the same rows to
    16 dims; the client-side reducer must match it.
  - eternalblue_response.json: the case-study query response.
  - relationships.json: relationship exports per type, for graph building.
"""
from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

REPO = Path(__file__).resolve().parents[2]
FIXTURES_OUT = REPO / "frontend" / "tests" / "fixtures"
CORPUS = REPO / "fixtures" / "eternalblue"
sys.path.insert(0, str(REPO / "src"))

from vulngraph.api.app import ORIGIN_HEADER, create_app  # noqa: E402
from vulngraph.embedding import EmbeddingCache  # noqa: E402
from vulngraph.graph import GraphStore  # noqa: E402
from vulngraph.pipeline import (  # noqa: E402
    PipelineConfig,
    PipelineState,
    SourceConfig,
    run_full,
)
from vulngraph.pipeline.config import ApiConfig  # noqa: E402


def build_client(tmp: Path) -> TestClient:
    config = PipelineConfig(
        store_path=str(tmp / "store"),
        sources=[
            SourceConfig("NVD", str(CORPUS / "nvd.ndjson")),
            SourceConfig("CWE", str(CORPUS / "cwe.ndjson")),
            SourceConfig("CVE_DETAILS", str(CORPUS / "cvedetails.ndjson")),
            SourceConfig("EXPLOITDB", str(CORPUS / "exploitdb.csv")),
        ],
    )
    store = GraphStore.open(config.store_path)
    run_full(config, PipelineState(), store)

    cache = EmbeddingCache(tmp / "embeddings", alpha=32, beta=99)
    ids = [f"CVE-2020-{1000 + i}" for i in range(100)]
    texts = [f"synthetic vulnerability description {i} token{i % 7} flaw{i % 3}"
             for i in range(100)]
    cache.build(2020, "HASH_DEFAULT", ids, texts)
    return TestClient(create_app(store, cache, ApiConfig(rate_limit_per_minute=100_000)))


def main() -> None:
    FIXTURES_OUT.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        client = build_client(Path(tmp))

        browser = client.get("/api/v1/llm_embedding",
                             params={"year": 2020, "dim": 16},
                             headers={ORIGIN_HEADER: "browser"}).json()
        assert browser["client_reduce_required"] is True
        server = client.get("/api/v1/llm_embedding",
                            params={"year": 2020, "dim": 16}).json()
        (FIXTURES_OUT / "parity.json").write_text(json.dumps({
            "payload": browser, "server_reduced": server,
        }))

        query = (CORPUS / "subgraph_query.cypher").read_text()
        response = client.post("/api/v1/cypher_query", json={"query": query}).json()
        (FIXTURES_OUT / "eternalblue_response.json").write_text(json.dumps(response))

        rels = {}
        for rel_type in ("EXPLOITS", "AFFECTS", "BELONGS_TO",
                         "EXAMPLE_OF", "WRITES", "REFERS_TO"):
            resp = client.get("/api/v1/relationship_download",
                              params={"rel_type": rel_type, "file_format": "json"})
            rels[rel_type] = json.loads(resp.text)
        (FIXTURES_OUT / "relationships.json").write_text(json.dumps(rels))

    print(f"fixtures written to {FIXTURES_OUT}")


if __name__ == "__main__":
    main()
