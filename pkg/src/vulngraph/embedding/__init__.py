from .benchmark import DEFAULT_DIMS, CostRow, benchmark_pca, cost_table_csv
from .models import (
    DEFAULT_MODEL,
    MODEL_DIMS,
    EmbedderRegistry,
    EmbeddingError,
    ExternalProcessEmbedder,
    HashingTextEmbedder,
    ProviderUnavailableError,
    default_registry,
    embed,
)
from .pca import BatchPCA, IncrementalPCA, fit_incremental, flip_signs, load_pca, save_pca
from .retrieval import (
    ORIGIN_API,
    ORIGIN_BROWSER,
    TIER_ALPHA,
    TIER_BETA_REDUCED,
    TIER_FULL,
    DimensionError,
    EmbeddingResponse,
    retrieve,
)
from .tiers import EmbeddingCache, MissingTierError, TierFormatError, TierSet

__all__ = [
    "DEFAULT_DIMS",
    "CostRow",
    "benchmark_pca",
    "cost_table_csv",
    "DEFAULT_MODEL",
    "MODEL_DIMS",
    "EmbedderRegistry",
    "EmbeddingError",
    "ExternalProcessEmbedder",
    "HashingTextEmbedder",
    "ProviderUnavailableError",
    "default_registry",
    "embed",
    "BatchPCA",
    "IncrementalPCA",
    "fit_incremental",
    "flip_signs",
    "load_pca",
    "save_pca",
    "ORIGIN_API",
    "ORIGIN_BROWSER",
    "TIER_ALPHA",
    "TIER_BETA_REDUCED",
    "TIER_FULL",
    "DimensionError",
    "EmbeddingResponse",
    "retrieve",
    "EmbeddingCache",
    "MissingTierError",
    "TierFormatError",
    "TierSet",
]
