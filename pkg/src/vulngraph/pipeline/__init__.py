from .config import (
    ApiConfig,
    ConfigError,
    EmbeddingConfig,
    PipelineConfig,
    SourceConfig,
    STREAM_CORE,
    STREAM_SUPPLEMENTARY,
    config_from_dict,
    load_config,
    parse_interval,
)
from .loader import resolve_deferred, validate_batch
from .runner import EmbeddingService, RunReport, fetch_bytes, run_full, run_subpipeline
from .scheduler import PipelineScheduler
from .state import (
    OUTCOME_FAILED,
    OUTCOME_PARTIAL,
    OUTCOME_SUCCESS,
    PipelineState,
    SourceState,
)

__all__ = [
    "ApiConfig",
    "ConfigError",
    "EmbeddingConfig",
    "PipelineConfig",
    "SourceConfig",
    "STREAM_CORE",
    "STREAM_SUPPLEMENTARY",
    "config_from_dict",
    "load_config",
    "parse_interval",
    "resolve_deferred",
    "validate_batch",
    "EmbeddingService",
    "RunReport",
    "fetch_bytes",
    "run_full",
    "run_subpipeline",
    "PipelineScheduler",
    "OUTCOME_FAILED",
    "OUTCOME_PARTIAL",
    "OUTCOME_SUCCESS",
    "PipelineState",
    "SourceState",
]
