"""Pipeline and service configuration (JSON file, human-editable).

Example:

    {
      "store_path": "data/store",
      "schedule": {"interval": "2h"},
      "sources": [
        {"source": "NVD", "locator": "fixtures/eternalblue/nvd.ndjson"},
        {"source": "CWE", "locator": "fixtures/eternalblue/cwe.ndjson"},
        {"source": "CVE_DETAILS", "locator": "fixtures/eternalblue/cvedetails.ndjson"},
        {"source": "EXPLOITDB", "locator": "fixtures/eternalblue/exploitdb.csv"}
      ],
      "embedding": {"models": ["HASH_DEFAULT"], "alpha": 32, "beta": 128},
      "api": {"port": 8000, "embedding_row_cap": 200, "rate_limit_per_minute": 120}
    }
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

SOURCE_IDS = ("NVD", "CWE", "CVE_DETAILS", "EXPLOITDB")

# The NVD feed is the core update stream; everything else is supplementary
# context (CVE_DETAILS additionally feeds the core enrichment path).
CORE_SOURCES = ("NVD",)

STREAM_CORE = "CORE"
STREAM_SUPPLEMENTARY = "SUPPLEMENTARY"

DEFAULT_INTERVAL_S = 2 * 60 * 60  # two-hour update cadence

_INTERVAL_RE = re.compile(r"^\s*(\d+)\s*(s|m|h|d)?\s*$")
_INTERVAL_UNITS = {"s": 1, "m": 60, "h": 3600, "d": 86400, None: 60}


class ConfigError(ValueError):
    pass


def parse_interval(value) -> int:
    """Interval in seconds from '2h' / '30m' / '90s' / bare minutes."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return int(value * 60)
    m = _INTERVAL_RE.match(str(value))
    if not m:
        raise ConfigError(f"bad interval: {value!r}")
    return int(m.group(1)) * _INTERVAL_UNITS[m.group(2)]


@dataclass
class SourceConfig:
    source: str
    locator: str
    enabled: bool = True

    def __post_init__(self):
        if self.source not in SOURCE_IDS:
            raise ConfigError(f"unknown source: {self.source!r}")

    @property
    def stream(self) -> str:
        return STREAM_CORE if self.source in CORE_SOURCES else STREAM_SUPPLEMENTARY


@dataclass
class EmbeddingConfig:
    models: list[str] = field(default_factory=lambda: ["HASH_DEFAULT"])
    alpha: int = 32
    beta: int = 128
    cache_dir: Optional[str] = None


@dataclass
class ApiConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    base_path: str = "/api/v1"
    embedding_row_cap: int = 200
    rate_limit_per_minute: int = 120
    cypher_row_cap: int = 10_000
    cors_origins: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.embedding_row_cap < 1:
            raise ConfigError("embedding_row_cap must be >= 1")
        if self.base_path != "/api/v1":
            raise ConfigError("the API base path is fixed at /api/v1")


@dataclass
class PipelineConfig:
    store_path: str = "data/store"
    sources: list[SourceConfig] = field(default_factory=list)
    interval_s: int = DEFAULT_INTERVAL_S
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    api: ApiConfig = field(default_factory=ApiConfig)

    def source(self, source_id: str) -> Optional[SourceConfig]:
        for src in self.sources:
            if src.source == source_id:
                return src
        return None

    @property
    def state_path(self) -> Path:
        return Path(self.store_path) / "state.json"

    @property
    def embedding_cache_dir(self) -> Path:
        if self.embedding.cache_dir:
            return Path(self.embedding.cache_dir)
        return Path(self.store_path) / "embeddings"


def load_config(path: str | Path) -> PipelineConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> PipelineConfig:
    sources = [SourceConfig(**entry) for entry in raw.get("sources", [])]
    schedule = raw.get("schedule", {})
    interval = parse_interval(schedule.get("interval", "2h"))
    embedding = EmbeddingConfig(**raw.get("embedding", {}))
    api = ApiConfig(**raw.get("api", {}))
    return PipelineConfig(
        store_path=raw.get("store_path", "data/store"),
        sources=sources,
        interval_s=interval,
        embedding=embedding,
        api=api,
    )
