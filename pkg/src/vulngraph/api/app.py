"""HTTP service: five routes under /api/v1.

    GET  /api/v1/docs                   endpoint documentation
    GET  /api/v1/node_download          export nodes with selected props
    GET  /api/v1/relationship_download  export edges with endpoint keys
    POST /api/v1/cypher_query           read-only query execution
    GET  /api/v1/llm_embedding          adaptive embedding retrieval

The API never writes to the store. Error bodies are
{"error", "detail", "position"?}; mutations get 403, oversized embedding
requests 413, per-client rate exhaustion 429.
"""
from __future__ import annotations

import logging
from typing import Optional

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ..embedding.retrieval import (
    ORIGIN_API,
    ORIGIN_BROWSER,
    DimensionError,
    retrieve,
)
from ..embedding.models import MODEL_DIMS
from ..embedding.tiers import EmbeddingCache, MissingTierError
from ..export import ExportError, export_nodes, export_relationships
from ..graph.schema import EDGE_TYPES, NODE_LABELS
from ..graph.store import GraphStore, StoreBusyError
from ..pipeline.config import ApiConfig
from ..query.executor import QueryExecutionError, execute
from ..query.parser import (
    QuerySemanticError,
    QuerySyntaxError,
    ReadOnlyViolation,
    parse_query,
)
from .ratelimit import API_KEY_HEADER, RateLimiter, client_key

logger = logging.getLogger(__name__)

BASE = "/api/v1"
ORIGIN_HEADER = "x-client-origin"


class CypherRequest(BaseModel):
    query: str


def _error(status: int, error: str, detail: str, **extra) -> JSONResponse:
    body = {"error": error, "detail": detail}
    body.update(extra)
    return JSONResponse(status_code=status, content=body)


def _split_multi(values: Optional[list[str]]) -> list[str]:
    out: list[str] = []
    for value in values or []:
        out.extend(v.strip() for v in value.split(",") if v.strip())
    return out


def create_app(store: GraphStore, cache: Optional[EmbeddingCache] = None,
               config: Optional[ApiConfig] = None,
               clock=None, static_dir=None) -> FastAPI:
    config = config or ApiConfig()
    app = FastAPI(docs_url=None, redoc_url=None, openapi_url=None)
    limiter = RateLimiter(config.rate_limit_per_minute,
                          **({"clock": clock} if clock else {}))

    if config.cors_origins:
        from fastapi.middleware.cors import CORSMiddleware
        app.add_middleware(CORSMiddleware, allow_origins=config.cors_origins,
                           allow_methods=["*"], allow_headers=["*"])

    @app.middleware("http")
    async def rate_limit(request: Request, call_next):
        if request.url.path.startswith(BASE):
            host = request.client.host if request.client else "anonymous"
            key = client_key(request.scope.get("headers", ()), host)
            allowed, retry_after = limiter.check(key)
            if not allowed:
                return JSONResponse(
                    status_code=429,
                    content={"error": "rate limited",
                             "detail": f"retry after {retry_after:.1f}s"},
                    headers={"Retry-After": f"{max(1, int(retry_after + 0.999))}"},
                )
        return await call_next(request)

    @app.get(BASE + "/docs")
    def docs():
        return {
            "base_path": BASE,
            "limits": {
                "embedding_row_cap": config.embedding_row_cap,
                "rate_limit_per_minute": config.rate_limit_per_minute,
                "cypher_row_cap": config.cypher_row_cap,
            },
            "headers": {
                "origin": ORIGIN_HEADER + ": browser marks browser-origin embedding requests",
                "api_key": API_KEY_HEADER + ": optional client identity for rate limiting",
            },
            "endpoints": {
                "docs": {"method": "GET", "params": {}},
                "node_download": {
                    "method": "GET",
                    "params": {"node_type": list(NODE_LABELS),
                               "props": "property names (repeat or comma-separate)",
                               "file_format": ["csv", "json"]},
                },
                "relationship_download": {
                    "method": "GET",
                    "params": {"rel_type": list(EDGE_TYPES),
                               "props": "edge property names (optional)",
                               "file_format": ["csv", "json"]},
                },
                "cypher_query": {
                    "method": "POST",
                    "body": {"query": "read-only MATCH/WHERE/RETURN/LIMIT text"},
                    "row_cap": config.cypher_row_cap,
                },
                "llm_embedding": {
                    "method": "GET",
                    "params": {"year": "CVE year", "model": list(MODEL_DIMS),
                               "dim": "requested dimensionality",
                               "ids": "optional cveID filter (repeat or comma-separate)"},
                    "row_cap": config.embedding_row_cap,
                },
            },
        }

    @app.get(BASE + "/node_download")
    def node_download(node_type: str,
                      props: list[str] = Query(default=[]),
                      file_format: str = "csv"):
        try:
            body = export_nodes(store, node_type, _split_multi(props), file_format)
        except ExportError as exc:
            return _error(400, "bad request", str(exc))
        media = "text/csv" if file_format == "csv" else "application/json"
        return Response(
            content=body, media_type=media,
            headers={"Content-Disposition":
                     f'attachment; filename="{node_type}.{file_format}"'})

    @app.get(BASE + "/relationship_download")
    def relationship_download(rel_type: str,
                              props: list[str] = Query(default=[]),
                              file_format: str = "csv"):
        try:
            body = export_relationships(store, rel_type, _split_multi(props), file_format)
        except ExportError as exc:
            return _error(400, "bad request", str(exc))
        media = "text/csv" if file_format == "csv" else "application/json"
        return Response(
            content=body, media_type=media,
            headers={"Content-Disposition":
                     f'attachment; filename="{rel_type}.{file_format}"'})

    @app.post(BASE + "/cypher_query")
    def cypher_query(body: CypherRequest):
        try:
            ast = parse_query(body.query)
            table = execute(ast, store)
        except ReadOnlyViolation as exc:
            return _error(403, "read-only subset", str(exc), keyword=exc.keyword)
        except QuerySyntaxError as exc:
            return _error(400, "syntax error", str(exc),
                          position={"line": exc.line, "column": exc.col})
        except (QuerySemanticError, QueryExecutionError) as exc:
            return _error(400, "invalid query", str(exc))
        except StoreBusyError as exc:
            return _error(503, "store busy", str(exc))
        payload = table.to_dict()
        truncated = len(payload["rows"]) > config.cypher_row_cap
        if truncated:
            payload["rows"] = payload["rows"][: config.cypher_row_cap]
        payload["row_count"] = len(payload["rows"])
        payload["truncated"] = truncated
        return payload

    @app.get(BASE + "/llm_embedding")
    def llm_embedding(request: Request, year: int, dim: int,
                      model: str = "HASH_DEFAULT",
                      ids: Optional[list[str]] = Query(default=None)):
        if cache is None:
            return _error(404, "not found", "no embedding cache is configured")
        id_list = _split_multi(ids) if ids is not None else None
        if id_list is not None and len(id_list) > config.embedding_row_cap:
            return _error(413, "too many rows",
                          f"at most {config.embedding_row_cap} rows per request; "
                          f"paginate via ids")
        origin = ORIGIN_BROWSER if request.headers.get(
            ORIGIN_HEADER, "").strip().lower() == "browser" else ORIGIN_API
        try:
            if id_list is None:
                n = cache.info(year, model).get("n", 0)
                if n > config.embedding_row_cap:
                    return _error(413, "too many rows",
                                  f"tier set has {n} rows, cap is "
                                  f"{config.embedding_row_cap}; paginate via ids")
            result = retrieve(cache, year, model, dim, origin, id_list)
        except MissingTierError as exc:
            return _error(404, "missing tier set", str(exc))
        except DimensionError as exc:
            return _error(400, "bad dimension", str(exc))
        except ValueError as exc:
            return _error(400, "bad request", str(exc))
        return result.to_dict()

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
