"""Adaptive tier selection for embedding retrieval.

Given the requested dimensionality d_r and the request origin, pick the
cheapest stored tier that can satisfy the request:

  - d_r <= alpha, browser origin: ship the light tier as-is; the client
    applies its own final reduction (client_reduce_required).
  - d_r <= alpha, API origin: reduce the light tier server-side.
  - alpha < d_r <= beta: reduce the mid tier server-side with the
    streaming reducer over fixed-size row batches.
  - d_r > beta: serve the full native matrix unmodified.

Server-side reductions are fitted on the whole tier matrix and then row
filtered, so every request sees the same embedding space.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .pca import BatchPCA, IncrementalPCA
from .tiers import EmbeddingCache, TierSet

ORIGIN_BROWSER = "BROWSER"
ORIGIN_API = "API"

TIER_ALPHA = "ALPHA"
TIER_BETA_REDUCED = "BETA_REDUCED"
TIER_FULL = "FULL"


class DimensionError(ValueError):
    """Requested dimensionality is outside [1, native dim]."""


@dataclass
class EmbeddingResponse:
    vectors: np.ndarray
    served_dim: int
    tier_used: str
    client_reduce_required: bool
    model: str
    year: int
    cve_ids: list[str]
    missing_ids: list[str]

    def to_dict(self) -> dict:
        return {
            "vectors": self.vectors.tolist(),
            "served_dim": self.served_dim,
            "tier_used": self.tier_used,
            "client_reduce_required": self.client_reduce_required,
            "model": self.model,
            "year": self.year,
            "cve_ids": self.cve_ids,
            "missing_ids": self.missing_ids,
        }


def _select(tiers: TierSet, ids: Optional[list[str]]):
    if ids is None:
        return list(range(tiers.n)), list(tiers.cve_ids), []
    rows, missing = tiers.positions(ids)
    return rows, [tiers.cve_ids[i] for i in rows], missing


def retrieve(cache: EmbeddingCache, year: int, model: str, d_r: int,
             origin: str = ORIGIN_API, ids: Optional[list[str]] = None,
             batch_size: int = 256) -> EmbeddingResponse:
    """Serve embeddings for (year, model) at the requested dimensionality."""
    if origin not in (ORIGIN_BROWSER, ORIGIN_API):
        raise ValueError(f"unknown origin: {origin!r}")
    tiers = cache.load(year, model)
    if not 1 <= d_r <= tiers.dim:
        raise DimensionError(f"dim must be in [1, {tiers.dim}], got {d_r}")

    rows, served_ids, missing = _select(tiers, ids)
    alpha_k = tiers.alpha_dim
    beta_k = tiers.beta_dim

    def response(vectors, served_dim, tier, reduce_required=False):
        return EmbeddingResponse(vectors, served_dim, tier, reduce_required,
                                 model, year, served_ids, missing)

    if alpha_k is not None and d_r <= alpha_k:
        if origin == ORIGIN_BROWSER:
            return response(tiers.alpha[rows], alpha_k, TIER_ALPHA,
                            reduce_required=d_r < alpha_k)
        if d_r == alpha_k:
            return response(tiers.alpha[rows], alpha_k, TIER_ALPHA)
        reducer = BatchPCA(d_r).fit(tiers.alpha)
        return response(reducer.transform(tiers.alpha[rows]), d_r, TIER_ALPHA)

    if beta_k is not None and d_r <= beta_k:
        if d_r == beta_k:
            return response(tiers.beta[rows], beta_k, TIER_BETA_REDUCED)
        reducer = IncrementalPCA(d_r, batch_size=batch_size).fit(tiers.beta)
        return response(reducer.transform(tiers.beta[rows]), d_r, TIER_BETA_REDUCED)

    return response(tiers.full[rows], tiers.dim, TIER_FULL)
